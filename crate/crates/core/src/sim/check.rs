//! Axiom monitoring over traces, and exact round trips of inverse conversions.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::compile::{compile_model, CompileOptions};
use crate::decimal::Decimal;
use crate::model::*;

use super::{EventKind, Trace, TypedValue, ENV};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome for one axiom or conversion pair. A failure carries the step (when
/// it comes from a trace) and the expected and actual values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub axiom: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub expected: Vec<TypedValue>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub actual: Vec<TypedValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Verdict {
    fn pass(axiom: &str) -> Self {
        Verdict { axiom: axiom.into(), status: Status::Pass, step: None, expected: Vec::new(), actual: Vec::new(), reason: None }
    }

    fn fail(axiom: &str, step: Option<u64>, expected: Vec<TypedValue>, actual: Vec<TypedValue>, reason: &str) -> Self {
        Verdict { axiom: axiom.into(), status: Status::Fail, step, expected, actual, reason: Some(reason.into()) }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

fn apply_chain(model: &DomainModel, chain: &[String], x: &Decimal) -> Option<Decimal> {
    chain.iter().try_fold(x.clone(), |v, c| model.conversion(c).map(|c| c.map.apply(&v)))
}

fn static_value(model: &DomainModel, sort: &str, attr: &str) -> Option<Decimal> {
    model.endurant(sort)?.attribute(attr).filter(|a| a.category == Category::Static)?.init.clone()
}

fn external_attr(channel: &str) -> Option<&str> {
    channel.strip_prefix("attr_")?.strip_suffix("_ch")
}

/// At each recursion of an axiom's target process, its targeted controllable
/// values must equal the axiom's chain applied to the source values: for a
/// source on another part, the value the sender held when it last sent to the
/// target; for a source on the target's own part, its latest reading. Before
/// the target has heard from every source there is nothing to check. Every
/// receive on a channel the axiom uses must also carry what was sent.
pub fn check_axioms(model: &DomainModel, trace: &Trace) -> Vec<Verdict> {
    if model.axioms.is_empty() {
        return Vec::new();
    }
    let graph = match compile_model(model, CompileOptions::default()) {
        Ok(g) => g,
        Err(e) => return model.axioms.iter().map(|a| Verdict::fail(&a.name, None, Vec::new(), Vec::new(), &e.to_string())).collect(),
    };
    let proc_of = |sort: &str| model.endurant(sort).map(EndurantDecl::process_name).unwrap_or_default();
    model.axioms.iter().map(|ax| check_one(model, ax, &graph, trace, &proc_of)).collect()
}

fn check_one(model: &DomainModel, ax: &AxiomDecl, graph: &crate::compile::ProcessGraph, trace: &Trace, proc_of: &dyn Fn(&str) -> String) -> Verdict {
    let target = proc_of(&ax.target_sort);
    let Some(def) = graph.process(&target) else {
        return Verdict::fail(&ax.name, None, Vec::new(), Vec::new(), "target behaviour is not in the compiled graph");
    };
    let order: Vec<&String> = def.signature.controllable_attrs().collect();
    let Some(slots) = ax.targets.iter().map(|t| order.iter().position(|a| *a == t)).collect::<Option<Vec<usize>>>() else {
        return Verdict::fail(&ax.name, None, Vec::new(), Vec::new(), "target attribute is not controllable");
    };
    let target_kinds: Vec<String> =
        ax.targets.iter().map(|t| model.endurant(&ax.target_sort).and_then(|e| e.attribute(t)).map(|a| a.quantity.clone()).unwrap_or_default()).collect();
    let sources: Vec<(String, &AxiomSource)> = ax.sources.iter().map(|s| (proc_of(&s.sort), s)).collect();

    // Latest external reading per (process, attribute).
    let mut readings: BTreeMap<(String, String), Decimal> = BTreeMap::new();
    // Per sending process: its readings when it last sent to the target.
    let mut at_send: BTreeMap<String, BTreeMap<String, Decimal>> = BTreeMap::new();
    let mut last_send: Option<&super::TraceEvent> = None;

    for ev in &trace.events {
        match ev.kind {
            EventKind::Receive if ev.peer.as_deref() == Some(ENV) => {
                if let (Some(attr), Some(v)) = (external_attr(&ev.channel), ev.payload.first()) {
                    readings.insert((ev.process.clone(), attr.to_string()), v.value.clone());
                }
            }
            EventKind::Send => {
                if ev.peer.as_deref() == Some(target.as_str()) && sources.iter().any(|(p, _)| *p == ev.process) {
                    let snapshot = readings.iter().filter(|((p, _), _)| *p == ev.process).map(|((_, a), v)| (a.clone(), v.clone())).collect();
                    at_send.insert(ev.process.clone(), snapshot);
                }
                last_send = Some(ev);
            }
            EventKind::Receive => {
                if ev.process == target && sources.iter().any(|(p, _)| Some(p.as_str()) == ev.peer.as_deref()) {
                    let sent = last_send.filter(|s| s.step == ev.step && s.channel == ev.channel && s.process.as_str() == ev.peer.as_deref().unwrap_or(""));
                    match sent {
                        Some(s) if s.payload == ev.payload => {}
                        Some(s) => return Verdict::fail(&ax.name, Some(ev.step), s.payload.clone(), ev.payload.clone(), "received payload differs from the one sent"),
                        None => return Verdict::fail(&ax.name, Some(ev.step), Vec::new(), ev.payload.clone(), "receive without a matching send"),
                    }
                }
            }
            EventKind::Recursion if ev.process == target => {
                let mut expected = Vec::new();
                for (i, (sp, src)) in sources.iter().enumerate() {
                    let raw = if *sp == target {
                        readings.get(&(target.clone(), src.attr.clone())).cloned().or_else(|| static_value(model, &src.sort, &src.attr))
                    } else {
                        at_send.get(sp).and_then(|snap| snap.get(&src.attr).cloned().or_else(|| static_value(model, &src.sort, &src.attr)))
                    };
                    let Some(raw) = raw else { break };
                    let Some(v) = apply_chain(model, &src.chain, &raw) else {
                        return Verdict::fail(&ax.name, Some(ev.step), Vec::new(), Vec::new(), "chain names an undeclared conversion");
                    };
                    expected.push(TypedValue { kind: target_kinds[i].clone(), value: v });
                }
                if expected.len() < sources.len() {
                    continue;
                }
                let actual: Vec<TypedValue> = slots.iter().filter_map(|&k| ev.payload.get(k).cloned()).collect();
                if actual != expected {
                    return Verdict::fail(&ax.name, Some(ev.step), expected, actual, "display does not track its sources");
                }
            }
            _ => {}
        }
    }
    Verdict::pass(&ax.name)
}

/// For every conversion with a declared inverse, `inverse(conv(x)) = x` must
/// hold exactly on `samples` seeded values. Recording conversions have no
/// inverse and are not checked.
pub fn conversion_roundtrip_check(model: &DomainModel, samples: usize, seed: u64) -> Vec<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for c in model.conversions.iter().filter(|c| !c.is_recording()) {
        let Some(inv_name) = &c.inverse_of else { continue };
        let name = format!("{inv_name}∘{}", c.name);
        let Some(inv) = model.conversion(inv_name) else {
            out.push(Verdict::fail(&name, None, Vec::new(), Vec::new(), "inverse is not declared"));
            continue;
        };
        let mut verdict = Verdict::pass(&name);
        for _ in 0..samples {
            let x = Decimal::new(rng.random_range(-1_000_000_000i64..=1_000_000_000), -rng.random_range(0..=6));
            let back = inv.map.apply(&c.map.apply(&x));
            if back != x {
                verdict = Verdict::fail(
                    &name,
                    None,
                    vec![TypedValue { kind: c.from.clone(), value: x }],
                    vec![TypedValue { kind: c.from.clone(), value: back }],
                    "round trip is not the identity",
                );
                break;
            }
        }
        out.push(verdict);
    }
    out
}

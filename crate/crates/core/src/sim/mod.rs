//! Runs a compiled graph on one thread with a seeded, deterministic
//! scheduler. Channels are synchronous: a send and its receive happen in the
//! same step. External channels are fed from an environment script.

mod check;
mod script;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::compile::{ChannelRole, ProcessDef, ProcessGraph, StepOp, Value, ValueRef};
use crate::decimal::Decimal;
use crate::model::{Affine, DomainModel};

pub use check::{check_axioms, conversion_roundtrip_check, Status, Verdict};
pub use script::{EnvironmentScript, Series};

/// Peer named on receive events from an external channel.
pub const ENV: &str = "env";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("external channel `{0}` has no script")]
    UncoveredChannel(String),
    #[error("controllable attribute `{0}` has no init value")]
    MissingInit(String),
    #[error("script for `{channel}` must start at step 0")]
    LateStart { channel: String },
    #[error("conversion `{0}` is not declared")]
    UnknownConversion(String),
    #[error("bad script: {0}")]
    Script(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Send,
    Receive,
    /// The process finished an iteration; the payload holds its new
    /// controllable values in parameter order.
    Recursion,
    /// Nothing could move; one per blocked process, naming its channel.
    Deadlock,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypedValue {
    pub kind: String,
    pub value: Decimal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub step: u64,
    pub kind: EventKind,
    pub channel: String,
    pub process: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peer: Option<String>,
    pub payload: Vec<TypedValue>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
}

impl Trace {
    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        self.events.iter().map(|e| serde_json::to_string(e).expect("event serializes") + "\n").collect()
    }

    pub fn deadlocked(&self) -> bool {
        self.events.last().is_some_and(|e| e.kind == EventKind::Deadlock)
    }

    pub fn is_prefix_of(&self, other: &Trace) -> bool {
        other.events.starts_with(&self.events)
    }
}

#[derive(Debug, Clone)]
struct ProcState {
    def: ProcessDef,
    pc: usize,
    statics: BTreeMap<String, Decimal>,
    controllables: BTreeMap<String, Decimal>,
    external: BTreeMap<String, Decimal>,
    received: BTreeMap<String, Vec<Decimal>>,
    recursed: bool,
}

impl ProcState {
    fn idle(&self) -> bool {
        self.def.body.ops.is_empty() && self.def.body.updates.is_empty()
    }
}

/// A graph ready to run: every process at the start of its first iteration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    procs: Vec<ProcState>,
    conversions: BTreeMap<String, Affine>,
    script: EnvironmentScript,
    /// Kind carried by each external channel.
    kinds: BTreeMap<String, String>,
    seed: u64,
}

impl RunConfig {
    pub fn process_count(&self) -> usize {
        self.procs.len()
    }

    pub fn process_names(&self) -> Vec<&str> {
        self.procs.iter().map(|p| p.def.name.as_str()).collect()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

pub fn instantiate(model: &DomainModel, graph: &ProcessGraph, script: &EnvironmentScript, seed: u64) -> Result<RunConfig, SimError> {
    for c in graph.channels.iter().filter(|c| c.role == ChannelRole::External) {
        let series = script.channels.get(&c.name).ok_or_else(|| SimError::UncoveredChannel(c.name.clone()))?;
        if series.points().first().map(|p| p.0) != Some(0) {
            return Err(SimError::LateStart { channel: c.name.clone() });
        }
    }
    let mut procs = Vec::new();
    for def in graph.processes() {
        if let Some(e) = model.endurant(&def.sort) {
            for a in e.attributes.iter().filter(|a| a.category.is_controllable() || a.category == crate::model::Category::Static) {
                if a.init.is_none() {
                    return Err(SimError::MissingInit(format!("{}.{}", e.name, a.name)));
                }
            }
        }
        procs.push(ProcState {
            def: def.clone(),
            pc: 0,
            statics: def.static_consts.iter().cloned().collect(),
            controllables: def.init.iter().cloned().collect(),
            external: BTreeMap::new(),
            received: BTreeMap::new(),
            recursed: false,
        });
    }
    let mut conversions = BTreeMap::new();
    for p in &procs {
        let values = p.def.body.ops.iter().flat_map(|op| match op {
            StepOp::Send { payload, .. } => payload.iter().collect::<Vec<_>>(),
            StepOp::Receive { .. } => Vec::new(),
        });
        for v in values.chain(p.def.body.updates.iter().map(|u| &u.value)) {
            for c in &v.conversions {
                let decl = model.conversion(c).ok_or_else(|| SimError::UnknownConversion(c.clone()))?;
                conversions.insert(c.clone(), decl.map.clone());
            }
        }
    }
    let kinds = graph.channels.iter().filter(|c| c.role == ChannelRole::External).map(|c| (c.name.clone(), c.message[0].clone())).collect();
    Ok(RunConfig { procs, conversions, script: script.clone(), kinds, seed })
}

struct Runner<'c> {
    procs: Vec<ProcState>,
    conversions: &'c BTreeMap<String, Affine>,
    script: &'c EnvironmentScript,
    kinds: &'c BTreeMap<String, String>,
    events: Vec<TraceEvent>,
}

impl Runner<'_> {
    fn eval(&self, p: &ProcState, v: &Value) -> TypedValue {
        let base = match &v.source {
            ValueRef::External { attr } => p.external.get(attr).cloned(),
            ValueRef::Static { attr } => p.statics.get(attr).cloned(),
            ValueRef::Controllable { attr } => p.controllables.get(attr).cloned(),
            ValueRef::Received { var, index } => p.received.get(var).and_then(|r| r.get(*index)).cloned(),
        }
        .unwrap_or_else(Decimal::zero);
        let value = v.conversions.iter().fold(base, |x, c| self.conversions[c].apply(&x));
        TypedValue { kind: v.kind.clone(), value }
    }

    /// Runs `i` through external reads and, at the end of its body, the
    /// recursion. Stops at an inter-behaviour operation, an exhausted script
    /// or after recursing. Returns whether anything happened.
    fn advance(&mut self, i: usize, step: u64) -> bool {
        let mut moved = false;
        loop {
            let p = &self.procs[i];
            if p.recursed || p.idle() {
                return moved;
            }
            match p.def.body.ops.get(p.pc) {
                None => {
                    let updates: Vec<(String, TypedValue)> = p.def.body.updates.iter().map(|u| (u.attr.clone(), self.eval(p, &u.value))).collect();
                    let p = &mut self.procs[i];
                    for (attr, v) in updates {
                        p.controllables.insert(attr, v.value);
                    }
                    let kinds: BTreeMap<&str, &str> = p.def.signature.controllable_params.iter().flat_map(|g| g.attrs.iter().zip(&g.kinds)).map(|(a, k)| (a.as_str(), k.as_str())).collect();
                    let payload = p
                        .def
                        .signature
                        .controllable_attrs()
                        .map(|a| TypedValue { kind: kinds[a.as_str()].to_string(), value: p.controllables[a].clone() })
                        .collect();
                    self.events.push(TraceEvent { step, kind: EventKind::Recursion, channel: String::new(), process: p.def.name.clone(), peer: None, payload });
                    p.pc = 0;
                    p.recursed = true;
                    p.received.clear();
                    return true;
                }
                Some(StepOp::Receive { channel, role: ChannelRole::External, .. }) => {
                    let Some(v) = self.script.channels.get(channel).and_then(|s| s.value_at(step)) else {
                        return moved;
                    };
                    let attr = channel_attr(channel);
                    let kind = self.kinds.get(channel).cloned().unwrap_or_default();
                    self.events.push(TraceEvent {
                        step,
                        kind: EventKind::Receive,
                        channel: channel.clone(),
                        process: p.def.name.clone(),
                        peer: Some(ENV.into()),
                        payload: vec![TypedValue { kind, value: v.clone() }],
                    });
                    let p = &mut self.procs[i];
                    p.external.insert(attr, v.clone());
                    p.pc += 1;
                    moved = true;
                }
                Some(_) => return moved,
            }
        }
    }

    /// Enabled rendezvous as (channel, sender index, receiver index), sorted by
    /// channel then sender name.
    fn enabled(&self) -> Vec<(String, usize, usize)> {
        let mut out = Vec::new();
        for (si, s) in self.procs.iter().enumerate() {
            if s.recursed {
                continue;
            }
            let Some(StepOp::Send { channel, .. }) = s.def.body.ops.get(s.pc) else { continue };
            for (ri, r) in self.procs.iter().enumerate() {
                if ri == si || r.recursed {
                    continue;
                }
                if let Some(StepOp::Receive { channel: c, role: ChannelRole::Inter, .. }) = r.def.body.ops.get(r.pc) {
                    if c == channel {
                        out.push((channel.clone(), si, ri));
                    }
                }
            }
        }
        out.sort_by(|a, b| (&a.0, &self.procs[a.1].def.name).cmp(&(&b.0, &self.procs[b.1].def.name)));
        out
    }

    fn rendezvous(&mut self, channel: &str, si: usize, ri: usize, step: u64) {
        let s = &self.procs[si];
        let Some(StepOp::Send { payload, .. }) = s.def.body.ops.get(s.pc) else { unreachable!("sender is at a send") };
        let values: Vec<TypedValue> = payload.iter().map(|v| self.eval(s, v)).collect();
        let (sname, rname) = (s.def.name.clone(), self.procs[ri].def.name.clone());
        self.events.push(TraceEvent { step, kind: EventKind::Send, channel: channel.into(), process: sname.clone(), peer: Some(rname.clone()), payload: values.clone() });
        self.events.push(TraceEvent { step, kind: EventKind::Receive, channel: channel.into(), process: rname, peer: Some(sname), payload: values.clone() });
        self.procs[si].pc += 1;
        let r = &mut self.procs[ri];
        if let Some(StepOp::Receive { var, .. }) = r.def.body.ops.get(r.pc) {
            r.received.insert(var.clone(), values.into_iter().map(|v| v.value).collect());
        }
        r.pc += 1;
    }

    fn deadlock(&mut self, step: u64) {
        let mut blocked: Vec<(String, String)> = self
            .procs
            .iter()
            .filter(|p| !p.idle())
            .map(|p| (p.def.name.clone(), p.def.body.ops.get(p.pc).map(|op| op.channel().to_string()).unwrap_or_default()))
            .collect();
        blocked.sort();
        for (process, channel) in blocked {
            self.events.push(TraceEvent { step, kind: EventKind::Deadlock, channel, process, peer: None, payload: Vec::new() });
        }
    }
}

/// Attribute name carried by an external channel `attr_<A>_ch`.
fn channel_attr(channel: &str) -> String {
    channel.strip_prefix("attr_").and_then(|c| c.strip_suffix("_ch")).unwrap_or(channel).to_string()
}

/// Runs at most `max_steps` steps. Each step lets every process read its
/// external inputs, then performs at most one rendezvous, chosen among the
/// enabled ones (sorted by channel and sender) at index `(seed + step) mod n`.
/// A step where nothing can move ends the run, with deadlock events unless
/// every process is idle.
pub fn run(config: &RunConfig, max_steps: u64) -> Trace {
    let mut r = Runner { procs: config.procs.clone(), conversions: &config.conversions, script: &config.script, kinds: &config.kinds, events: Vec::new() };
    for step in 0..max_steps {
        for p in &mut r.procs {
            p.recursed = false;
        }
        let mut moved = false;
        for i in 0..r.procs.len() {
            moved |= r.advance(i, step);
        }
        let enabled = r.enabled();
        if !enabled.is_empty() {
            let n = enabled.len() as u64;
            let pick = ((config.seed % n + step % n) % n) as usize;
            let (channel, si, ri) = enabled[pick].clone();
            r.rendezvous(&channel, si, ri, step);
            r.advance(si, step);
            r.advance(ri, step);
            moved = true;
        }
        if !moved {
            if r.procs.iter().any(|p| !p.idle()) {
                r.deadlock(step);
            }
            break;
        }
    }
    Trace { events: r.events }
}

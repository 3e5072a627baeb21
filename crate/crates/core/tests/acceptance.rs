//! Acceptance suite: one line per criterion, then a non-zero exit if any
//! criterion failed. Limits and sample counts are fixed below.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use domcalc_core::analysis::{check_wellformed, describe_sort, observe_attributes, observe_mereology, observe_part_sorts, observe_unique_identifier};
use domcalc_core::compile::{compile_model, graph_json, print_process, CompileOptions};
use domcalc_core::corpus::{aircraft, AIRCRAFT_DOM};
use domcalc_core::dsl::{parse_model, parse_str, print_model};
use domcalc_core::sim::{check_axioms, instantiate, run, EnvironmentScript, EventKind, Series, Status, Trace};
use domcalc_core::units::ledger::{check_op, mean, Operator, Precondition, Quantity, Verdict as LedgerVerdict};
use domcalc_core::units::{dim_div, dim_mul, dim_pow, parse_unit, Dimension, KindRegistry};
use domcalc_core::{id_types_of, Category, Decimal, DomainModel, MereologyExpr};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FAST: Duration = Duration::from_secs(1);
const DISCHARGE_LIMIT: Duration = Duration::from_secs(10);
const DISCHARGE_SCRIPTS: u64 = 100;
const DISCHARGE_STEPS: u64 = 50;
const GROUP_LAW_CASES: u32 = 10_000;
const SIM_TRIPLES: u64 = 100;
const SIM_STEPS: u64 = 60;
const DESCRIBE_MODELS: u64 = 100;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn d(s: &str) -> Decimal {
    s.parse().unwrap()
}

// 1 ------------------------------------------------------------------------

fn aircraft_corpus() -> Outcome {
    let out = parse_model("aircraft.dom", AIRCRAFT_DOM);
    ensure(out.diagnostics.is_empty(), || format!("parse diagnostics: {:?}", out.diagnostics))?;
    let m = out.model;

    let ac = m.endurant("AC").ok_or("no AC")?;
    ensure(ac.children() == ["PP", "TD", "DP"], || format!("AC children {:?}", ac.children()))?;
    let ids: BTreeSet<String> = id_types_of(&m);
    let want: BTreeSet<String> = ["ACI", "PPI", "TDI", "DPI"].map(String::from).into();
    ensure(ids == want, || format!("id types {ids:?}"))?;

    let id = |s: &str| MereologyExpr::Id(s.into());
    let mereo = [
        ("AC", MereologyExpr::Empty),
        ("PP", id("DPI")),
        ("TD", id("DPI")),
        ("DP", MereologyExpr::Product(vec![id("PPI"), id("TDI")])),
    ];
    for (sort, expr) in mereo {
        let got = m.endurant(sort).and_then(|e| e.mereology.clone());
        ensure(got.as_ref() == Some(&expr), || format!("mereology of {sort}: {got:?}"))?;
    }

    let attrs = [
        ("PP", vec!["LO", "LA", "AL"], Category::Reactive),
        ("TD", vec!["VEL", "ACC"], Category::Reactive),
        ("DP", vec!["dLO", "dLA", "dAL", "dVEL", "dACC"], Category::Programmable),
    ];
    for (sort, names, cat) in attrs {
        let e = m.endurant(sort).unwrap();
        let got: BTreeSet<&str> = e.attributes.iter().map(|a| a.name.as_str()).collect();
        ensure(got == names.iter().copied().collect(), || format!("attributes of {sort}: {got:?}"))?;
        ensure(e.attributes.iter().all(|a| a.category == cat && a.quantity == a.name), || format!("categories of {sort}"))?;
    }
    ensure(m.endurants.len() == 4 && ac.attributes.is_empty(), || "unexpected extra sorts or AC attributes".into())?;

    let diags = check_wellformed(&m);
    ensure(diags.is_empty(), || format!("check_wellformed: {diags:?}"))?;
    ensure(parse_str(&print_model(&m)).as_ref() == Ok(&m), || "print/parse round trip differs".into())?;
    Ok("4 sorts, 4 id types, 3 mereologies, 10 attributes; no diagnostics".into())
}

// 2 ------------------------------------------------------------------------

fn schema_reproduction() -> Outcome {
    let m = aircraft();
    let g = compile_model(&m, CompileOptions::default()).map_err(|e| e.to_string())?;
    ensure(g.roots.len() == 1 && g.roots[0].core.is_none(), || "AC core should be elided".into())?;
    let names: Vec<&str> = g.processes().iter().map(|p| p.name.as_str()).collect();
    ensure(names == ["position", "travel_dynamics", "display"], || format!("processes {names:?}"))?;
    ensure(g.roots[0].children.iter().all(|c| c.children.is_empty() && c.core.is_some()), || "children must be atomic".into())?;

    let pos = g.process("position").unwrap();
    ensure(pos.signature.in_channels == ["attr_LO_ch", "attr_LA_ch", "attr_AL_ch"], || format!("position in {:?}", pos.signature.in_channels))?;
    ensure(pos.signature.out_channels == ["po_di_ch"], || "position out".into())?;
    ensure(pos.signature.static_params.is_empty() && pos.signature.controllable_params.is_empty(), || "position has no statics or controllables".into())?;

    let td = g.process("travel_dynamics").unwrap();
    ensure(td.signature.in_channels == ["attr_VEL_ch", "attr_ACC_ch"] && td.signature.out_channels == ["td_di_ch"], || "travel_dynamics channels".into())?;

    let di = g.process("display").unwrap();
    let da: Vec<Vec<&str>> = di.signature.controllable_params.iter().map(|g| g.attrs.iter().map(String::as_str).collect()).collect();
    ensure(da == [vec!["dLA", "dLO", "dAL"], vec!["dVEL", "dACC"]], || format!("DA = {da:?}"))?;
    ensure(di.signature.in_channels == ["po_di_ch", "td_di_ch"] && di.signature.out_channels.is_empty(), || "display channels".into())?;

    let text = print_process(&g);
    let pbd = "position(pπ,dπ) ≡ let (lo,la,al) = (attr_LO_ch?,attr_LA_ch?,attr_AL_ch?) in po_di_ch ! (a2rLO(lo),a2rLA(la),a2rAL(al)); position(pπ,dπ) end";
    ensure(text.contains(pbd), || "position definition text differs".into())?;

    let golden = include_str!("golden/aircraft.graph.json");
    ensure(graph_json(&g) == golden, || "process graph JSON differs from golden".into())?;
    Ok("position ∥ travel_dynamics ∥ display; signatures and JSON match".into())
}

// 3 ------------------------------------------------------------------------

fn random_aircraft_script(seed: u64) -> EnvironmentScript {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = EnvironmentScript::new();
    // (channel, magnitude bound, fractional digits)
    for (ch, bound, digits) in [("attr_LO_ch", 180, 4), ("attr_LA_ch", 90, 4), ("attr_AL_ch", 12_000, 1), ("attr_VEL_ch", 1_000, 2), ("attr_ACC_ch", 10, 3)] {
        let period = rng.random_range(1..=7u64);
        let scale = 10i64.pow(digits);
        let points = (0..period).map(|t| (t, Decimal::new(rng.random_range(-bound * scale..=bound * scale), -(digits as i32)))).collect();
        s = s.with(ch, Series::Cyclic { period, points });
    }
    s
}

/// The recordings sent by position and travel dynamics, recomputed from the
/// sender's latest readings with the corpus factors written out.
fn recordings_match(t: &Trace) -> Result<(), String> {
    let factor = |ch: &str| match ch {
        "attr_LO_ch" | "attr_LA_ch" => d("1000"),
        "attr_AL_ch" => d("3.28084"),
        "attr_VEL_ch" => d("0.539957"),
        _ => d("1"),
    };
    let mut latest: std::collections::BTreeMap<&str, Decimal> = Default::default();
    for e in &t.events {
        if e.peer.as_deref() == Some("env") {
            latest.insert(&e.channel, e.payload[0].value.clone());
        }
        let chans: &[&str] = match (e.kind, e.channel.as_str()) {
            (EventKind::Send, "po_di_ch") => &["attr_LO_ch", "attr_LA_ch", "attr_AL_ch"],
            (EventKind::Send, "td_di_ch") => &["attr_VEL_ch", "attr_ACC_ch"],
            _ => continue,
        };
        for (v, ch) in e.payload.iter().zip(chans) {
            let want = latest[ch].clone() * factor(ch);
            ensure(v.value == want, || format!("step {}: {} sent {} for {ch}, expected {want}", e.step, e.channel, v.value))?;
        }
    }
    Ok(())
}

fn axiom_discharge() -> Outcome {
    let m = aircraft();
    let g = compile_model(&m, CompileOptions::default()).map_err(|e| e.to_string())?;
    let mut mutants = 0;
    for i in 0..DISCHARGE_SCRIPTS {
        let script = random_aircraft_script(i);
        let t = run(&instantiate(&m, &g, &script, i).map_err(|e| e.to_string())?, DISCHARGE_STEPS);
        ensure(!t.deadlocked(), || format!("script {i} deadlocked"))?;
        recordings_match(&t).map_err(|e| format!("script {i}: {e}"))?;
        let verdicts = check_axioms(&m, &t);
        ensure(verdicts.len() == 2 && verdicts.iter().all(|v| v.passed()), || format!("script {i}: untampered run fails {verdicts:?}"))?;

        // Perturb one display payload: a received message or the values it
        // recursed with.
        let mut rng = ChaCha8Rng::seed_from_u64(i ^ 0xdead);
        let candidates: Vec<usize> = t
            .events
            .iter()
            .enumerate()
            .filter(|(_, e)| e.process == "display" && !e.payload.is_empty() && matches!(e.kind, EventKind::Receive | EventKind::Recursion))
            .map(|(k, _)| k)
            .collect();
        let k = candidates[rng.random_range(0..candidates.len())];
        let mut bad = t.clone();
        let ev = &mut bad.events[k];
        let slot = rng.random_range(0..ev.payload.len());
        let original = ev.payload[slot].value.clone();
        let delta = Decimal::new(rng.random_range(1..=1000i64) * if rng.random_bool(0.5) { 1 } else { -1 }, -rng.random_range(0..=3));
        ev.payload[slot].value = original.clone() + delta;
        let perturbed = ev.payload[slot].value.clone();
        let (step, kind, channel) = (ev.step, ev.kind, ev.channel.clone());

        // Which axiom the slot belongs to.
        let axiom = match (kind, channel.as_str()) {
            (EventKind::Receive, "po_di_ch") => "pos",
            (EventKind::Receive, _) => "tdy",
            _ if slot < 3 => "pos",
            _ => "tdy",
        };
        let verdicts = check_axioms(&m, &bad);
        for v in &verdicts {
            if v.axiom == axiom {
                ensure(v.status == Status::Fail, || format!("script {i}: mutation at step {step} slot {slot} not caught"))?;
                ensure(v.step == Some(step), || format!("script {i}: witness step {:?}, mutated {step}", v.step))?;
                let pos = v.actual.iter().position(|x| x.value == perturbed).ok_or_else(|| format!("script {i}: witness lacks perturbed value"))?;
                ensure(v.expected.get(pos).map(|x| &x.value) == Some(&original), || format!("script {i}: witness expected {:?}, original {original}", v.expected))?;
            } else {
                ensure(v.passed(), || format!("script {i}: unrelated axiom {} failed", v.axiom))?;
            }
        }
        mutants += 1;
    }
    Ok(format!("{DISCHARGE_SCRIPTS} scripts x {DISCHARGE_STEPS} steps pass; {mutants}/{mutants} mutants caught with witness"))
}

// 4 ------------------------------------------------------------------------

const BASE: [&str; 7] = ["m", "kg", "s", "A", "K", "mol", "cd"];

/// Sums the exponents of `(base symbol, power)` factors.
fn oracle(factors: &[(&str, i32)]) -> Dimension {
    let mut v = [0; 7];
    for (sym, p) in factors {
        let i = BASE.iter().position(|b| b == sym).unwrap_or_else(|| panic!("not a base symbol: {sym}"));
        v[i] += p;
    }
    Dimension(v)
}

/// Derived and further units with their base-unit expansions. Henry is
/// kg m^2 s^-2 A^-2.
#[rustfmt::skip]
fn unit_tables() -> Vec<(&'static str, &'static str, Vec<(&'static str, i32)>)> {
    vec![
        // name or symbol, derived-type expression, base expansion
        ("rad", "m/m", vec![]),
        ("sr", "m^2*m^-2", vec![]),
        ("Hz", "s^-1", vec![("s", -1)]),
        ("N", "kg*m*s^-2", vec![("kg", 1), ("m", 1), ("s", -2)]),
        ("Pa", "N/m^2", vec![("kg", 1), ("m", 1), ("s", -2), ("m", -2)]),
        ("J", "N*m", vec![("kg", 1), ("m", 2), ("s", -2)]),
        ("W", "J/s", vec![("kg", 1), ("m", 2), ("s", -3)]),
        ("C", "s*A", vec![("s", 1), ("A", 1)]),
        ("V", "W/A", vec![("kg", 1), ("m", 2), ("s", -3), ("A", -1)]),
        ("F", "C/V", vec![("kg", -1), ("m", -2), ("s", 4), ("A", 2)]),
        ("Ω", "V/A", vec![("kg", 1), ("m", 2), ("s", -3), ("A", -2)]),
        ("S", "A/V", vec![("kg", -1), ("m", -2), ("s", 3), ("A", 2)]),
        ("Wb", "V*s", vec![("kg", 1), ("m", 2), ("s", -2), ("A", -1)]),
        ("T", "Wb/m^2", vec![("kg", 1), ("s", -2), ("A", -1)]),
        ("H", "Wb/A", vec![("kg", 1), ("m", 2), ("s", -2), ("A", -2)]),
        ("°C", "K", vec![("K", 1)]),
        ("lm", "cd*sr", vec![("cd", 1)]),
        ("lx", "lm/m^2", vec![("m", -2), ("cd", 1)]),
        ("m^2", "m^2", vec![("m", 2)]),
        ("m^3", "m^3", vec![("m", 3)]),
        ("m/s", "m/s", vec![("m", 1), ("s", -1)]),
        ("m/s^2", "m/s^2", vec![("m", 1), ("s", -2)]),
        ("m^-1", "m^-1", vec![("m", -1)]),
        ("kg/m^3", "kg/m^3", vec![("kg", 1), ("m", -3)]),
        ("m^3/kg", "m^3/kg", vec![("m", 3), ("kg", -1)]),
        ("A/m^2", "A/m^2", vec![("A", 1), ("m", -2)]),
        ("A/m", "A/m", vec![("A", 1), ("m", -1)]),
        ("mol/m^3", "mol/m^3", vec![("mol", 1), ("m", -3)]),
        ("cd/m^2", "cd/m^2", vec![("cd", 1), ("m", -2)]),
        ("kg/kg", "1", vec![]),
    ]
}

#[rustfmt::skip]
const PREFIXES: [(&str, i32); 20] = [
    ("da", 1), ("h", 2), ("k", 3), ("M", 6), ("G", 9), ("T", 12), ("P", 15), ("E", 18), ("Z", 21), ("Y", 24),
    ("d", -1), ("c", -2), ("m", -3), ("μ", -6), ("n", -9), ("p", -12), ("f", -15), ("a", -18), ("z", -21), ("y", -24),
];

fn pow10(p: i32) -> BigRational {
    let t = BigRational::from_integer(BigInt::from(10).pow(p.unsigned_abs()));
    if p < 0 {
        t.recip()
    } else {
        t
    }
}

fn units_tables() -> Outcome {
    let mut mismatches = Vec::new();
    let tables = unit_tables();
    for (sym, derived, factors) in &tables {
        let want = oracle(factors);
        for text in [*sym, *derived] {
            match parse_unit(text) {
                Ok((dim, scale)) if dim == want && scale.is_one() => {}
                other => mismatches.push(format!("{text}: {other:?}, oracle {want}")),
            }
        }
    }
    for (p, power) in PREFIXES {
        for unit in ["m", "s", "A"] {
            let text = format!("{p}{unit}");
            match parse_unit(&text) {
                Ok((dim, scale)) if dim == oracle(&[(unit, 1)]) && scale == pow10(power) => {}
                other => mismatches.push(format!("{text}: {other:?}, expected 10^{power}")),
            }
        }
    }
    // Kilogram carries its own prefix: grams scale by 10^-3 before prefixing.
    match parse_unit("mg") {
        Ok((dim, scale)) if dim == oracle(&[("kg", 1)]) && scale == pow10(-6) => {}
        other => mismatches.push(format!("mg: {other:?}")),
    }
    ensure(mismatches.is_empty(), || format!("{} mismatches: {}", mismatches.len(), mismatches.join("; ")))?;
    Ok(format!("{} table entries, {} prefixes; zero mismatches", tables.len(), PREFIXES.len()))
}

// 5 ------------------------------------------------------------------------

fn operator_ledger() -> Outcome {
    let reg = KindRegistry::builtin();
    let k = |n: &str| reg.get(n).unwrap_or_else(|| panic!("kind {n}")).clone();
    let verdict = |op, a: &str, b: &str| check_op(&reg, op, &k(a), &k(b)).map_err(|e| e.to_string());

    ensure(verdict(Operator::Add, "Time", "Time")?.is_forbidden(), || "Time + Time allowed".into())?;
    match verdict(Operator::Sub, "Time", "Time")? {
        LedgerVerdict::Allowed { result, precondition: Some(Precondition::RhsNotAfterLhs) } if result.name == "TimeInterval" => {}
        v => return Err(format!("Time - Time: {v:?}")),
    }
    ensure(verdict(Operator::Mul, "TimeInterval", "Real")?.result().map(|r| r.name.as_str()) == Some("TimeInterval"), || "TimeInterval * Real".into())?;
    ensure(verdict(Operator::Div, "TimeInterval", "TimeInterval")?.result().map(|r| r.name.as_str()) == Some("Real"), || "TimeInterval / TimeInterval".into())?;
    ensure(verdict(Operator::Add, "Temp", "Temp")?.is_forbidden(), || "Temp + Temp allowed".into())?;
    let temps = [Quantity::new(k("Temp"), d("283.15")), Quantity::new(k("Temp"), d("293.15"))];
    let mt = mean(&reg, &temps).map_err(|e| e.to_string())?;
    ensure(mt.kind.name == "MeanTemp" && mt.value == d("288.15"), || format!("mean(Temps) = {mt}"))?;

    // Closure: every operator over every pair of registered kinds gets a
    // verdict, sampled exhaustively and then by property test.
    let kinds = reg.kinds().to_vec();
    let mut verdicts = 0;
    for a in &kinds {
        for b in &kinds {
            for op in Operator::ALL {
                check_op(&reg, op, a, b).map_err(|e| format!("{} {} {}: {e}", a.name, op.symbol(), b.name))?;
                verdicts += 1;
            }
        }
    }
    let mut runner = TestRunner::new(Config { cases: 2_000, failure_persistence: None, ..Config::default() });
    let n = kinds.len();
    runner
        .run(&(0..n, 0..n, 0..Operator::ALL.len()), |(i, j, o)| {
            let v = check_op(&reg, Operator::ALL[o], &kinds[i], &kinds[j]);
            prop_assert!(v.is_ok());
            // Point kinds never add.
            if kinds[i].role == domcalc_core::units::Role::Point && kinds[j].role == domcalc_core::units::Role::Point && o == 0 {
                prop_assert!(v.unwrap().is_forbidden());
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("6 reference verdicts hold; {verdicts} kind-pair verdicts, none unhandled"))
}

// 6 ------------------------------------------------------------------------

fn group_laws() -> Outcome {
    let dim = || proptest::array::uniform7(-8i32..=8).prop_map(Dimension);
    let mut runner = TestRunner::new(Config { cases: GROUP_LAW_CASES, failure_persistence: None, ..Config::default() });
    runner
        .run(&(dim(), dim(), dim(), -4i32..=4), |(a, b, c, n)| {
            prop_assert_eq!(dim_mul(a, b), dim_mul(b, a));
            prop_assert_eq!(dim_mul(dim_mul(a, b), c), dim_mul(a, dim_mul(b, c)));
            prop_assert_eq!(dim_mul(a, Dimension::DIMENSIONLESS), a);
            prop_assert_eq!(dim_mul(a, dim_div(Dimension::DIMENSIONLESS, a)), Dimension::DIMENSIONLESS);
            prop_assert_eq!(dim_div(a, b), dim_mul(a, dim_div(Dimension::DIMENSIONLESS, b)));
            let mut want = a.0;
            want.iter_mut().for_each(|e| *e *= n);
            prop_assert_eq!(dim_pow(a, n), Dimension(want));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!("commutativity, associativity, identity, inverse over {GROUP_LAW_CASES} cases"))
}

// 7 ------------------------------------------------------------------------

fn determinism_and_prefix() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut events = 0;
    for i in 0..SIM_TRIPLES {
        let m = common::model(i);
        ensure(m.parts().count() <= 5 && m.endurants.iter().all(|e| e.attributes.len() <= 3), || "generator bounds".into())?;
        let g = compile_model(&m, CompileOptions::default()).map_err(|e| format!("model {i}: {e}"))?;
        let script = common::script(&g, i.wrapping_mul(31), SIM_STEPS);
        let seed = rng.random::<u64>();
        let config = instantiate(&m, &g, &script, seed).map_err(|e| format!("model {i}: {e}"))?;
        let full = run(&config, SIM_STEPS);
        let again = run(&instantiate(&m, &g, &script, seed).map_err(|e| e.to_string())?, SIM_STEPS);
        ensure(full.to_jsonl() == again.to_jsonl(), || format!("model {i}: rerun differs"))?;
        let n = rng.random_range(0..=SIM_STEPS);
        ensure(run(&config, n).is_prefix_of(&full), || format!("model {i}: run({n}) is not a prefix of run({SIM_STEPS})"))?;
        events += full.len();
    }
    Ok(format!("{SIM_TRIPLES} (model, script, seed) triples; {events} events compared"))
}

// 8 ------------------------------------------------------------------------

fn reparse_cleanly(m: &DomainModel, sort: &str, formal: &str) -> Result<(), String> {
    let alone = parse_model("prompt.dom", formal);
    ensure(!alone.has_errors(), || format!("{sort}: formal text does not parse: {:?}\n{formal}", alone.diagnostics))?;
    let text = format!("{}\n{formal}", print_model(m));
    let m2 = parse_str(&text).map_err(|d| format!("{sort}: {d:?}"))?;
    let diags = check_wellformed(&m2);
    ensure(diags.iter().all(|d| !d.is_error()), || format!("{sort}: {diags:?}\n{formal}"))?;
    ensure(describe_sort(&m2, sort) == describe_sort(m, sort), || format!("{sort}: description changed after re-parse"))?;
    Ok(())
}

fn description_idempotence() -> Outcome {
    let mut models: Vec<DomainModel> = (0..DESCRIBE_MODELS).map(common::model).collect();
    models.push(aircraft());
    let mut texts = 0;
    for m in &models {
        for e in &m.endurants {
            let s = e.name.as_str();
            let mut all = String::new();
            let prompts = [observe_part_sorts(m, s), observe_unique_identifier(m, s), observe_mereology(m, s), observe_attributes(m, s)];
            for d in prompts.into_iter().flatten() {
                let formal = d.formal_text();
                reparse_cleanly(m, s, &formal)?;
                all.push_str(&formal);
                texts += 1;
            }
            reparse_cleanly(m, s, &all)?;
        }
    }
    Ok(format!("{} models, {texts} prompt outputs re-parse and re-validate", models.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 8] = [
        ("aircraft corpus round-trip", aircraft_corpus, Some(FAST)),
        ("schema reproduction", schema_reproduction, Some(FAST)),
        ("axiom discharge and mutation", axiom_discharge, Some(DISCHARGE_LIMIT)),
        ("unit tables", units_tables, None),
        ("operator ledger", operator_ledger, None),
        ("dimension group laws", group_laws, None),
        ("simulator determinism and prefixes", determinism_and_prefix, None),
        ("description idempotence", description_idempotence, None),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, limit) {
            if took >= *limit {
                outcome = Err(format!("took {took:?}, limit {limit:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}; {took:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Seeded generators for well-formed models and their environment scripts.
#![allow(dead_code)]

use std::fmt::Write;

use domcalc_core::compile::{ChannelRole, ProcessGraph};
use domcalc_core::dsl::parse_str;
use domcalc_core::sim::{EnvironmentScript, Series};
use domcalc_core::{Decimal, DomainModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXTERNAL: [&str; 3] = ["inert", "reactive", "autonomous"];

#[derive(Clone, Copy, PartialEq)]
enum AttrClass {
    External,
    Static,
    Programmable,
}

struct GenAttr {
    name: String,
    class: AttrClass,
    text: String,
}

/// A decimal with up to `scale` fractional digits in [-10^6, 10^6].
pub fn decimal(rng: &mut impl Rng, scale: i32) -> Decimal {
    Decimal::new(rng.random_range(-1_000_000i64..=1_000_000), -rng.random_range(0..=scale))
}

/// Source text of a random well-formed model: 1 to 4 atomic parts with 1 to 3
/// attributes each, random mereologies, axioms where a programmable attribute
/// has a related external or static source, declared channels for the other
/// related pairs, and sometimes a composite whole.
pub fn model_source(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=4usize);
    let mut s = String::from(
        "quantity X : interval \"m\";\nquantity Y : plain \"kg\";\nquantity rX : plain \"1\";\nquantity dX : plain \"1\";\n\
         conversion a2rX : X -> rX = affine(1000, 0);\n\
         conversion r2dX : rX -> dX inverse d2rX = affine(2, 0);\n\
         conversion d2rX : dX -> rX inverse r2dX = affine(0.5, 0);\n",
    );

    let mut attrs: Vec<Vec<GenAttr>> = Vec::new();
    for p in 0..n {
        let k = rng.random_range(1..=3usize);
        let mut list = Vec::new();
        for i in 0..k {
            let name = format!("a{p}{i}");
            let class = match rng.random_range(0..3) {
                0 => AttrClass::External,
                1 => AttrClass::Static,
                _ => AttrClass::Programmable,
            };
            let text = match class {
                AttrClass::External => {
                    let q = if rng.random_bool(0.7) { "X" } else { "Y" };
                    format!("attr {name} : {q} {};", EXTERNAL[rng.random_range(0..3)])
                }
                AttrClass::Static => {
                    let q = if rng.random_bool(0.7) { "X" } else { "Y" };
                    format!("attr {name} : {q} static init {};", decimal(&mut rng, 2))
                }
                AttrClass::Programmable => format!("attr {name} : dX programmable init {};", decimal(&mut rng, 1)),
            };
            list.push(GenAttr { name, class, text });
        }
        attrs.push(list);
    }

    // related[p][q]: p's mereology names q.
    let mut mentions = vec![vec![false; n]; n];
    for (p, row) in mentions.iter_mut().enumerate() {
        for (q, cell) in row.iter_mut().enumerate() {
            *cell = p != q && rng.random_bool(0.4);
        }
    }
    let related = |p: usize, q: usize| mentions[p][q] || mentions[q][p];

    // Axioms: every programmable attribute tracks an X source on its own
    // part or a related one, when one exists.
    let mut axioms = String::new();
    let mut flows = vec![vec![false; n]; n];
    for q in 0..n {
        let mut targets = Vec::new();
        let mut sources = Vec::new();
        for t in attrs[q].iter().filter(|a| a.class == AttrClass::Programmable) {
            let candidates: Vec<(usize, &GenAttr)> = (0..n)
                .filter(|&p| p == q || related(p, q))
                .flat_map(|p| attrs[p].iter().map(move |a| (p, a)))
                .filter(|(_, a)| a.class != AttrClass::Programmable && a.text.contains(": X "))
                .collect();
            if candidates.is_empty() {
                continue;
            }
            let (p, a) = candidates[rng.random_range(0..candidates.len())];
            targets.push(format!("P{q}.{}", t.name));
            sources.push(format!("P{p}.{} via a2rX -> r2dX", a.name));
            if p != q {
                flows[p][q] = true;
            }
        }
        if !targets.is_empty() {
            let _ = writeln!(axioms, "axiom ax{q} {{ display({}) tracks ({}); }}", targets.join(", "), sources.join(", "));
        }
    }

    let mut channels = String::new();
    for p in 0..n {
        for q in (p + 1)..n {
            if related(p, q) && !flows[p][q] && !flows[q][p] {
                let (from, to) = if rng.random_bool(0.5) { (p, q) } else { (q, p) };
                let kind = attrs[from][0].text.split(':').nth(1).unwrap().split_whitespace().next().unwrap().to_string();
                let _ = writeln!(channels, "channel p{from}_p{to}_ch : {kind};");
            }
        }
    }

    let composite = n >= 2 && rng.random_bool(0.5);
    if composite {
        let children: Vec<String> = (0..n).map(|p| format!("P{p}")).collect();
        let _ = writeln!(s, "part W composite({}) {{ id WI; mereo empty; }}", children.join(", "));
    }
    for p in 0..n {
        let ids: Vec<String> = (0..n).filter(|&q| mentions[p][q]).map(|q| format!("P{q}I")).collect();
        let mereo = if ids.is_empty() { "empty".to_string() } else { ids.join(" x ") };
        let _ = writeln!(s, "part P{p} {{ id P{p}I; mereo {mereo};");
        for a in &attrs[p] {
            let _ = writeln!(s, "  {}", a.text);
        }
        s.push_str("}\n");
    }
    s.push_str(&channels);
    s.push_str(&axioms);
    s
}

pub fn model(seed: u64) -> DomainModel {
    let src = model_source(seed);
    parse_str(&src).unwrap_or_else(|d| panic!("generated model does not parse: {d:?}\n{src}"))
}

/// A script covering every external channel of `graph` for at least `steps`
/// steps: cyclic series or finite ones that last long enough.
pub fn script(graph: &ProcessGraph, seed: u64, steps: u64) -> EnvironmentScript {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut script = EnvironmentScript::new();
    for c in graph.channels.iter().filter(|c| c.role == ChannelRole::External) {
        let series = if rng.random_bool(0.5) {
            let period = rng.random_range(1..=5u64);
            let mut points = vec![(0, decimal(&mut rng, 3))];
            for t in 1..period {
                if rng.random_bool(0.5) {
                    points.push((t, decimal(&mut rng, 3)));
                }
            }
            Series::Cyclic { period, points }
        } else {
            let mut points = vec![(0, decimal(&mut rng, 3))];
            let mut t = 0;
            while t < steps {
                t += rng.random_range(1..=4u64);
                points.push((t, decimal(&mut rng, 3)));
            }
            Series::Finite(points)
        };
        script.channels.insert(c.name.clone(), series);
    }
    script
}

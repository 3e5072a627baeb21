//! Benchmark fixtures: the aircraft corpus, and a fleet of sensors feeding one
//! display whose size is a parameter.

use std::fmt::Write;

use domcalc_core::compile::{compile_model, ChannelRole, CompileOptions, ProcessGraph};
use domcalc_core::dsl::parse_str;
use domcalc_core::sim::{EnvironmentScript, Series};
use domcalc_core::{Decimal, DomainModel};

pub use domcalc_core::corpus::{aircraft, AIRCRAFT_DOM, AIRCRAFT_SCRIPT};

/// Source of a model with `n` sensor parts, each sending one recorded reading
/// to a shared display that tracks all of them.
pub fn fleet_source(n: usize) -> String {
    let mut s = String::from(
        "quantity X : interval \"m\";\nquantity rX : plain \"1\";\nquantity dX : plain \"1\";\n\
         conversion a2rX : X -> rX = affine(1000, 0);\n\
         conversion r2dX : rX -> dX inverse d2rX = affine(0.001, 0);\n\
         conversion d2rX : dX -> rX inverse r2dX = affine(1000, 0);\n",
    );
    let ids: Vec<String> = (0..n).map(|i| format!("S{i}I")).collect();
    let _ = writeln!(s, "part D {{ id DI; mereo {};", if n == 0 { "empty".into() } else { ids.join(" x ") });
    for i in 0..n {
        let _ = writeln!(s, "  attr d{i} : dX programmable init 0;");
    }
    s.push_str("}\n");
    for i in 0..n {
        let _ = writeln!(s, "part S{i} {{ id S{i}I; mereo DI; attr x{i} : X reactive; }}");
        let _ = writeln!(s, "axiom ax{i} {{ display(D.d{i}) tracks (S{i}.x{i} via a2rX -> r2dX); }}");
    }
    s
}

pub fn fleet(n: usize) -> DomainModel {
    parse_str(&fleet_source(n)).expect("fleet model parses")
}

pub fn compiled(model: &DomainModel) -> ProcessGraph {
    compile_model(model, CompileOptions::default()).expect("fixture compiles")
}

/// Every external channel of the graph gets a short cyclic series.
pub fn cyclic_script(graph: &ProcessGraph) -> EnvironmentScript {
    let mut script = EnvironmentScript::new();
    for (i, c) in graph.channels.iter().filter(|c| c.role == ChannelRole::External).enumerate() {
        let points = (0..4).map(|t| (t, Decimal::new((i as i64 + 1) * 1000 + t as i64 * 37, -2))).collect();
        script = script.with(&c.name, Series::Cyclic { period: 4, points });
    }
    script
}

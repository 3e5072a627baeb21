use std::fmt::Write;

use crate::model::*;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn print_type_decl(names: &[String]) -> String {
    format!("type {};", names.join(", "))
}

pub fn print_quantity(q: &QuantityDecl) -> String {
    let mut s = format!("quantity {} : {} {}", q.name, q.role.keyword(), quote(&q.unit));
    if let Some(i) = &q.interval {
        let _ = write!(s, " interval {i}");
    }
    if let Some(m) = &q.mean {
        let _ = write!(s, " mean {m}");
    }
    if q.ordered {
        s.push_str(" ordered");
    }
    s.push(';');
    s
}

pub fn print_endurant(e: &EndurantDecl, doc: Option<&str>) -> String {
    let mut s = format!("{} {}", e.kind.keyword(), e.name);
    if e.discreteness != e.kind.default_discreteness() {
        let _ = write!(s, " {}", e.discreteness.keyword());
    }
    if let Structure::Composite(children) = &e.structure {
        let _ = write!(s, " composite({})", children.join(", "));
    }
    s.push_str(" {\n");
    if let Some(id) = &e.id_type {
        let _ = writeln!(s, "  id {id};");
    }
    if let Some(m) = &e.mereology {
        let _ = writeln!(s, "  mereo {} -> {m};", e.name);
    }
    let b = &e.behaviour;
    if let Some(p) = &b.process {
        let _ = write!(s, "  behaviour {p}");
        if let Some(a) = &b.channel_abbrev {
            let _ = write!(s, " as {a}");
        }
        if let Some(ph) = &b.uid_placeholder {
            let _ = write!(s, " pi {ph}");
        }
        s.push_str(";\n");
    }
    for a in &e.attributes {
        let _ = write!(s, "  attr {} : {}", a.name, a.quantity);
        if a.category != Category::Static {
            let _ = write!(s, " {}", a.category.keyword());
        }
        if let Some(v) = &a.init {
            let _ = write!(s, " init {v}");
        }
        s.push_str(";\n");
    }
    if let Some(d) = doc {
        let _ = writeln!(s, "  doc {};", quote(d));
    }
    s.push('}');
    s
}

pub fn print_conversion(c: &ConversionDecl) -> String {
    let mut s = format!("conversion {} : {} -> {}", c.name, c.from, c.to);
    if let Some(inv) = &c.inverse_of {
        let _ = write!(s, " inverse {inv}");
    }
    let _ = write!(s, " = affine({}, {});", c.map.scale, c.map.offset);
    s
}

pub fn print_channel(c: &ChannelDecl) -> String {
    format!("channel {} : {};", c.name, c.message.join(" x "))
}

pub fn print_axiom(a: &AxiomDecl, doc: Option<&str>) -> String {
    let targets: Vec<String> = a.targets.iter().map(|t| format!("{}.{t}", a.target_sort)).collect();
    let sources: Vec<String> = a
        .sources
        .iter()
        .map(|src| {
            if src.chain.is_empty() {
                format!("{}.{}", src.sort, src.attr)
            } else {
                format!("{}.{} via {}", src.sort, src.attr, src.chain.join(" -> "))
            }
        })
        .collect();
    let mut s = format!("axiom {} {{\n  display({}) tracks ({});\n", a.name, targets.join(", "), sources.join(", "));
    if let Some(d) = doc {
        let _ = writeln!(s, "  doc {};", quote(d));
    }
    s.push('}');
    s
}

pub fn print_observer(o: &ObserverDecl) -> String {
    let target = match &o.target {
        ObserverTarget::Sort(s) => s.clone(),
        ObserverTarget::UniqueId(i) => i.clone(),
        ObserverTarget::Mereology(m) => m.to_string(),
        ObserverTarget::Attribute { quantity, category } => format!("{quantity} x value {}", category.keyword()),
    };
    format!("observe {} : {} -> {target};", o.name, o.from)
}

/// Canonical text of a model. Declarations are grouped by kind in a fixed
/// order and keep their order within each group, so parsing the output gives
/// back an equal model.
pub fn print_model(m: &DomainModel) -> String {
    let mut blocks: Vec<String> = Vec::new();
    let mut push_group = |lines: Vec<String>, sep: &str| {
        if !lines.is_empty() {
            blocks.push(lines.join(sep));
        }
    };
    push_group(m.types.iter().map(|t| print_type_decl(t)).collect(), "\n");
    push_group(m.quantities.iter().map(print_quantity).collect(), "\n");
    push_group(
        m.endurants.iter().map(|e| print_endurant(e, m.docs.get(&format!("sort:{}", e.name)).map(String::as_str))).collect(),
        "\n\n",
    );
    push_group(m.conversions.iter().map(print_conversion).collect(), "\n");
    push_group(m.channels.iter().map(print_channel).collect(), "\n");
    push_group(
        m.axioms.iter().map(|a| print_axiom(a, m.docs.get(&format!("axiom:{}", a.name)).map(String::as_str))).collect(),
        "\n\n",
    );
    push_group(m.observers.iter().map(print_observer).collect(), "\n");
    let mut out = blocks.join("\n\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

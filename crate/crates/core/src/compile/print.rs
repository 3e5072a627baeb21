//! Formal text for compiled behaviours, in the let/in, `!`/`?` notation.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::*;

fn tuple(items: &[String]) -> String {
    if items.len() == 1 {
        items[0].clone()
    } else {
        format!("({})", items.join(","))
    }
}

fn source_text(r: &ValueRef) -> String {
    match r {
        ValueRef::External { attr } => attr.to_lowercase(),
        ValueRef::Static { attr } | ValueRef::Controllable { attr } => attr.clone(),
        ValueRef::Received { var, index } => format!("{var}.{index}"),
    }
}

/// `v` as nested conversion calls, e.g. `r2dLO(a2rLO(lo))`.
pub fn value_text(v: &Value) -> String {
    value_with(v, &source_text(&v.source))
}

fn value_with(v: &Value, base: &str) -> String {
    v.conversions.iter().fold(base.to_string(), |acc, c| format!("{c}({acc})"))
}

fn init_text(p: &ProcessDef, g: &ControllableGroup) -> String {
    let vals: Vec<String> = g
        .attrs
        .iter()
        .map(|a| p.init.iter().find(|(n, _)| n == a).map(|(_, v)| v.to_string()).unwrap_or_default())
        .collect();
    tuple(&vals)
}

fn call(p: &ProcessDef, args: Option<Vec<String>>) -> String {
    let mut s = format!("{}({})", p.name, p.params);
    if let Some(args) = args {
        if !args.is_empty() {
            let _ = write!(s, "({})", args.join(","));
        }
    }
    s
}

fn initial_call(p: &ProcessDef) -> String {
    call(p, Some(p.signature.controllable_params.iter().map(|g| init_text(p, g)).collect()))
}

fn node_expr(n: &ProcessNode, nested: bool) -> String {
    let mut items: Vec<String> = Vec::new();
    if let Some(c) = &n.core {
        items.push(initial_call(c));
    }
    items.extend(n.children.iter().map(|c| node_expr(c, true)));
    if nested && items.len() > 1 {
        format!("({})", items.join(" ∥ "))
    } else {
        items.join(" ∥ ")
    }
}

fn signature_line(p: &ProcessDef) -> String {
    let sig = &p.signature;
    let mut domain = vec![sig.uid_param.clone()];
    if !sig.mereology_param.is_empty() {
        let m = sig.mereology_param.to_string().replace(" x ", " × ");
        domain.push(if matches!(sig.mereology_param, MereologyExpr::Product(_)) { format!("({m})") } else { m });
    }
    if !sig.static_params.is_empty() {
        domain.push(format!("({})", sig.static_params.join(" × ")));
    }
    let mut s = format!("{}: {} →", p.name, domain.join(" × "));
    if !sig.controllable_params.is_empty() {
        let groups: Vec<String> = sig.controllable_params.iter().map(|g| format!("({})", g.attrs.join("×"))).collect();
        let _ = write!(s, " {} →", groups.join("×"));
    }
    if !sig.in_channels.is_empty() {
        let _ = write!(s, " in {}", sig.in_channels.join(","));
    }
    if !sig.out_channels.is_empty() {
        let _ = write!(s, " out {}", sig.out_channels.join(","));
    }
    s.push_str(" Unit");
    s
}

/// Parameter names for the elements of a received tuple, from the kinds sent.
fn element_names(kinds: &[String]) -> Vec<String> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    kinds
        .iter()
        .map(|k| {
            let base = k.to_lowercase();
            let n = seen.entry(base.clone()).or_insert(0);
            *n += 1;
            if *n == 1 {
                base
            } else {
                format!("{base}{n}")
            }
        })
        .collect()
}

struct Conv {
    name: String,
    params: Vec<String>,
    body: Vec<String>,
}

/// Per controllable group, the `conv_<group>` applied at recursion, or the
/// group name itself when the group is left unchanged.
fn conversions(p: &ProcessDef, graph: &ProcessGraph) -> (Vec<String>, Vec<Conv>) {
    let mut received: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for op in &p.body.ops {
        if let StepOp::Receive { channel, var, role: ChannelRole::Inter } = op {
            let kinds = graph.channel(channel).map(|c| c.message.clone()).unwrap_or_default();
            received.insert(var.clone(), element_names(&kinds));
        }
    }
    let mut args = Vec::new();
    let mut convs = Vec::new();
    for g in &p.signature.controllable_params {
        let updates: Vec<&Update> = g.attrs.iter().filter_map(|a| p.body.updates.iter().find(|u| &u.attr == a)).collect();
        if updates.is_empty() {
            args.push(g.name.clone());
            continue;
        }
        let mut vars: Vec<String> = Vec::new();
        for u in &updates {
            let v = match &u.value.source {
                ValueRef::Received { var, .. } => var.clone(),
                other => source_text(other),
            };
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        let params: Vec<String> = vars.iter().map(|v| received.get(v).map(|names| tuple(names)).unwrap_or_else(|| v.clone())).collect();
        let body = g
            .attrs
            .iter()
            .map(|a| match p.body.updates.iter().find(|u| &u.attr == a) {
                Some(u) => {
                    let base = match &u.value.source {
                        ValueRef::Received { var, index } => received.get(var).and_then(|n| n.get(*index).cloned()).unwrap_or_else(|| source_text(&u.value.source)),
                        other => source_text(other),
                    };
                    value_with(&u.value, &base)
                }
                None => a.clone(),
            })
            .collect();
        let name = format!("conv_{}", g.name);
        args.push(format!("{name}({})", vars.join(",")));
        convs.push(Conv { name, params, body });
    }
    (args, convs)
}

fn definition(p: &ProcessDef, graph: &ProcessGraph) -> (String, Vec<Conv>) {
    let (args, convs) = conversions(p, graph);
    let groups: Vec<String> = p.signature.controllable_params.iter().map(|g| g.name.clone()).collect();
    let mut s = format!("{} ≡ ", call(p, Some(groups)));
    let mut lets = 0;
    let ops = &p.body.ops;
    let mut i = 0;
    while i < ops.len() {
        if let StepOp::Send { channel, payload } = &ops[i] {
            let vals: Vec<String> = payload.iter().map(value_text).collect();
            let _ = write!(s, "{channel} ! {}; ", tuple(&vals));
            i += 1;
            continue;
        }
        let mut vars = Vec::new();
        let mut chans = Vec::new();
        while let Some(StepOp::Receive { channel, var, .. }) = ops.get(i) {
            vars.push(var.clone());
            chans.push(format!("{channel}?"));
            i += 1;
        }
        let _ = write!(s, "let {} = {} in ", tuple(&vars), tuple(&chans));
        lets += 1;
    }
    s.push_str(&call(p, Some(args)));
    for _ in 0..lets {
        s.push_str(" end");
    }
    (s, convs)
}

/// The whole graph: channel declarations, the parallel composition of each
/// root and every behaviour's signature and definition.
pub fn print_process(graph: &ProcessGraph) -> String {
    let mut s = String::new();
    if !graph.channels.is_empty() {
        s.push_str("-- channels\n");
        for c in &graph.channels {
            let _ = writeln!(s, "channel {} : {}", c.name, c.message.join(" × "));
        }
    }
    if !graph.roots.is_empty() {
        s.push_str("-- system\n");
        for r in &graph.roots {
            let _ = writeln!(s, "{} ≡ {}", r.sort, node_expr(r, false));
        }
    }
    let procs = graph.processes();
    if !procs.is_empty() {
        s.push_str("-- behaviours\n");
    }
    for (i, p) in procs.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        let _ = writeln!(s, "{}", signature_line(p));
        let (def, convs) = definition(p, graph);
        let _ = writeln!(s, "{def}");
        for (name, v) in &p.static_consts {
            let _ = writeln!(s, "  where {name} = {v}");
        }
        for c in convs {
            let head = match c.params.as_slice() {
                [one] if one.starts_with('(') => format!("{}{one}", c.name),
                many => format!("{}({})", c.name, many.join(",")),
            };
            let _ = writeln!(s, "{head} ≡ {}", tuple(&c.body));
        }
    }
    s
}

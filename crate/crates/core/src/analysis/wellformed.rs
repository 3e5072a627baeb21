use std::collections::{BTreeMap, BTreeSet};

use crate::diag::{has_errors, Diagnostic};
use crate::model::*;
use crate::units::{typecheck_str, KindRegistry, TypeEnv};

use super::registry::model_registry_with;

/// All well-formedness violations of `model`, without source positions.
pub fn check_wellformed(model: &DomainModel) -> Vec<Diagnostic> {
    check_wellformed_with(model, &SourceMap::default())
}

/// All well-formedness violations of `model`, located through `map`. When no
/// error is found the compiler's own preconditions are checked as well, so an
/// empty result means the model compiles.
pub fn check_wellformed_with(model: &DomainModel, map: &SourceMap) -> Vec<Diagnostic> {
    let (reg, diags) = model_registry_with(model, map);
    let mut c = Checker { model, reg: &reg, map, diags };
    c.types();
    c.sorts();
    c.attributes();
    c.conversions();
    c.channels();
    c.axioms();
    c.observers();
    let mut diags = c.diags;
    if !has_errors(&diags) {
        diags.extend(crate::compile::preflight(model, map));
    }
    diags.sort_by(|a, b| (a.span.start(), a.code).cmp(&(b.span.start(), b.code)));
    diags
}

struct Checker<'a> {
    model: &'a DomainModel,
    reg: &'a KindRegistry,
    map: &'a SourceMap,
    diags: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn err(&mut self, code: &'static str, msg: String, key: &str) {
        let span = self.map.span(key);
        self.diags.push(Diagnostic::error(code, msg, span));
    }

    fn warn(&mut self, code: &'static str, msg: String, key: &str) {
        let span = self.map.span(key);
        self.diags.push(Diagnostic::warning(code, msg, span));
    }

    fn types(&mut self) {
        let ids = id_types_of(self.model);
        for names in &self.model.types {
            for n in names {
                if self.model.endurant(n).is_none() && !ids.contains(n) && !self.reg.contains(n) {
                    self.err("E114", format!("`{n}` is neither a sort, an id type nor a quantity kind"), &format!("type:{n}"));
                }
            }
        }
    }

    fn sorts(&mut self) {
        let m = self.model;
        let mut id_owner: BTreeMap<&str, &str> = BTreeMap::new();
        let mut parent: BTreeMap<&str, &str> = BTreeMap::new();
        for e in &m.endurants {
            let key = format!("sort:{}", e.name);
            for v in e.matrix_violations() {
                self.err("E103", format!("{} `{}`: {v}", e.kind.keyword(), e.name), &key);
            }
            if let Some(id) = &e.id_type {
                if let Some(first) = id_owner.insert(id, &e.name) {
                    id_owner.insert(id, first);
                    self.err("E115", format!("id type `{id}` of `{}` is already the id type of `{first}`", e.name), &format!("id:{}", e.name));
                }
            }
            if let Structure::Composite(children) = &e.structure {
                if children.is_empty() {
                    self.warn("W103", format!("composite `{}` lists no part sorts", e.name), &key);
                }
                for c in children {
                    let ckey = format!("child:{}.{c}", e.name);
                    match m.endurant(c) {
                        None => self.err("E104", format!("unknown sort `{c}` in composite `{}`", e.name), &ckey),
                        Some(ce) if ce.kind != EndurantKind::Part => {
                            self.err("E103", format!("`{c}` is a {}; composites contain parts", ce.kind.keyword()), &ckey)
                        }
                        Some(_) => {
                            if let Some(p) = parent.insert(c, &e.name) {
                                if p != e.name {
                                    self.err("E118", format!("`{c}` is a part of both `{p}` and `{}`", e.name), &ckey);
                                }
                            }
                        }
                    }
                }
            }
            if let Some(mer) = &e.mereology {
                let ids = id_types_of(m);
                for leaf in mer.leaves() {
                    if !ids.contains(leaf) {
                        self.err("E101", format!("mereology of `{}` refers to undeclared id type `{leaf}`", e.name), &format!("mereo:{}", e.name));
                    }
                }
            }
        }
        for cycle in composite_cycles(m) {
            let first = cycle[0].clone();
            let mut path = cycle.clone();
            path.push(first.clone());
            self.err("E102", format!("composite cycle {}", path.join(" -> ")), &format!("sort:{first}"));
        }
    }

    fn attributes(&mut self) {
        for e in &self.model.endurants {
            for a in &e.attributes {
                if !self.reg.contains(&a.quantity) {
                    self.err(
                        "E106",
                        format!("unknown quantity kind `{}` for attribute `{}.{}`", a.quantity, e.name, a.name),
                        &format!("attrkind:{}.{}", e.name, a.name),
                    );
                }
            }
        }
    }

    fn conversions(&mut self) {
        let m = self.model;
        for c in &m.conversions {
            let key = format!("conversion:{}", c.name);
            for k in [&c.from, &c.to] {
                if !self.reg.contains(k) {
                    self.err("E106", format!("unknown quantity kind `{k}` in conversion `{}`", c.name), &key);
                }
            }
            match &c.inverse_of {
                Some(inv_name) => {
                    if c.is_recording() {
                        self.err("E110", format!("`{}` converts actual values to recordings and cannot have an inverse", c.name), &key);
                    }
                    match m.conversion(inv_name) {
                        None => self.err("E108", format!("unknown conversion `{inv_name}` named as inverse of `{}`", c.name), &key),
                        Some(inv) => {
                            if inv.inverse_of.as_deref() != Some(c.name.as_str()) {
                                self.err("E112", format!("`{inv_name}` does not name `{}` as its inverse", c.name), &key);
                            }
                            if inv.from != c.to || inv.to != c.from {
                                self.err(
                                    "E112",
                                    format!("`{inv_name}` maps {} -> {}; the inverse of `{}` must map {} -> {}", inv.from, inv.to, c.name, c.to, c.from),
                                    &key,
                                );
                            }
                            if c.name < inv.name && !inv.map.compose(&c.map).is_identity() {
                                self.warn("W112", format!("`{inv_name}` ∘ `{}` is not the identity", c.name), &key);
                            }
                        }
                    }
                }
                None if c.is_display() => {
                    self.err("E111", format!("display conversion `{}` must declare its inverse", c.name), &key);
                }
                None => {}
            }
        }
    }

    fn channels(&mut self) {
        for ch in &self.model.channels {
            for k in &ch.message {
                if !self.reg.contains(k) {
                    self.err("E106", format!("unknown quantity kind `{k}` in channel `{}`", ch.name), &format!("channel:{}", ch.name));
                }
            }
        }
    }

    fn axioms(&mut self) {
        let m = self.model;
        let mut env = TypeEnv::default();
        for c in &m.conversions {
            if let (Some(f), Some(t)) = (self.reg.get(&c.from), self.reg.get(&c.to)) {
                env.functions.insert(c.name.clone(), (f.clone(), t.clone()));
            }
        }
        let mut targeted: BTreeMap<(String, String), String> = BTreeMap::new();
        for ax in &m.axioms {
            let key = format!("axiom:{}", ax.name);
            let Some(target) = m.endurant(&ax.target_sort) else {
                self.err("E104", format!("axiom `{}` targets unknown sort `{}`", ax.name, ax.target_sort), &key);
                continue;
            };
            if target.kind != EndurantKind::Part {
                self.err("E104", format!("axiom `{}` targets `{}`, which is not a part", ax.name, target.name), &key);
                continue;
            }
            if ax.targets.len() != ax.sources.len() {
                self.err(
                    "E116",
                    format!("axiom `{}` pairs {} targets with {} sources", ax.name, ax.targets.len(), ax.sources.len()),
                    &key,
                );
            }
            for (i, (t, src)) in ax.targets.iter().zip(&ax.sources).enumerate() {
                let tkey = format!("axiom:{}.target.{i}", ax.name);
                let skey = format!("axiom:{}.source.{i}", ax.name);
                let Some(ta) = target.attribute(t) else {
                    self.err("E105", format!("`{}` has no attribute `{t}`", target.name), &tkey);
                    continue;
                };
                if ta.category != Category::Programmable {
                    self.err("E107", format!("axiom target `{}.{t}` is {}, not programmable", target.name, ta.category.keyword()), &tkey);
                }
                if let Some(prev) = targeted.insert((target.name.clone(), t.clone()), ax.name.clone()) {
                    self.err("E119", format!("`{}.{t}` is already determined by axiom `{prev}`", target.name), &tkey);
                }
                let Some(se) = m.endurant(&src.sort) else {
                    self.err("E104", format!("unknown sort `{}` in axiom `{}`", src.sort, ax.name), &skey);
                    continue;
                };
                if se.kind != EndurantKind::Part {
                    self.err("E104", format!("axiom source `{}` is not a part", se.name), &skey);
                    continue;
                }
                let Some(sa) = se.attribute(&src.attr) else {
                    self.err("E105", format!("`{}` has no attribute `{}`", se.name, src.attr), &skey);
                    continue;
                };
                if !(sa.category.is_external() || sa.category == Category::Static) {
                    self.err(
                        "E109",
                        format!("axiom source `{}.{}` is {}; sources must be static, inert, reactive or autonomous", se.name, sa.name, sa.category.keyword()),
                        &skey,
                    );
                }
                if se.name != target.name && !related(se, target) {
                    self.err("E117", format!("`{}` and `{}` are not related by their mereologies", se.name, target.name), &skey);
                }
                let (Some(sk), Some(tk)) = (self.reg.get(&sa.quantity), self.reg.get(&ta.quantity)) else {
                    continue;
                };
                let var = format!("{}.{}", se.name, sa.name);
                let text = src.chain.iter().fold(var.clone(), |acc, c| format!("{c}({acc})"));
                let env = env.clone().with_var(&var, sk.clone());
                match typecheck_str(self.reg, &text, &env) {
                    Err(d) => self.err("E108", format!("axiom `{}`: {}", ax.name, d.message), &skey),
                    Ok(k) if k.name != tk.name => self.err(
                        "E108",
                        format!("axiom `{}`: `{text}` yields {} but `{}.{t}` is {}", ax.name, k.name, target.name, tk.name),
                        &skey,
                    ),
                    Ok(_) => {}
                }
            }
        }
    }

    fn observers(&mut self) {
        let m = self.model;
        for o in &m.observers {
            let key = format!("observer:{}", o.name);
            let Some(from) = m.endurant(&o.from) else {
                self.err("E104", format!("observer `{}` applies to unknown sort `{}`", o.name, o.from), &key);
                continue;
            };
            let problem = match &o.target {
                ObserverTarget::Sort(s) => {
                    if o.name != format!("obs_{s}") {
                        Some(format!("should be named obs_{s}"))
                    } else if !from.children().contains(s) {
                        Some(format!("`{s}` is not a part sort of `{}`", from.name))
                    } else {
                        None
                    }
                }
                ObserverTarget::UniqueId(id) => {
                    if o.name != format!("uid_{}", from.name) {
                        Some(format!("should be named uid_{}", from.name))
                    } else if from.id_type.as_ref() != Some(id) {
                        Some(format!("the id type of `{}` is not `{id}`", from.name))
                    } else {
                        None
                    }
                }
                ObserverTarget::Mereology(e) => {
                    if o.name != format!("mereo_{}", from.name) {
                        Some(format!("should be named mereo_{}", from.name))
                    } else if from.mereology.as_ref() != Some(e) {
                        Some(format!("the mereology of `{}` is not `{e}`", from.name))
                    } else {
                        None
                    }
                }
                ObserverTarget::Attribute { quantity, category } => {
                    let attr = o.name.strip_prefix("attr_").unwrap_or_default();
                    match from.attribute(attr) {
                        None => Some(format!("`{}` has no attribute `{attr}`", from.name)),
                        Some(a) if &a.quantity != quantity || a.category != *category => Some(format!(
                            "`{}.{attr}` is {} {}",
                            from.name,
                            a.quantity,
                            a.category.keyword()
                        )),
                        Some(_) => None,
                    }
                }
            };
            if let Some(p) = problem {
                self.err("E113", format!("observer `{}`: {p}", o.name), &key);
            }
        }
    }
}

/// True when either part's mereology mentions the other's id type.
pub(crate) fn related(a: &EndurantDecl, b: &EndurantDecl) -> bool {
    let mentions = |x: &EndurantDecl, y: &EndurantDecl| match (&x.mereology, &y.id_type) {
        (Some(m), Some(id)) => m.leaves().contains(&id.as_str()),
        _ => false,
    };
    mentions(a, b) || mentions(b, a)
}

/// Cycles in the composite-children relation, each listed from its first
/// member in declaration order and reported once.
pub(crate) fn composite_cycles(m: &DomainModel) -> Vec<Vec<String>> {
    let order: BTreeMap<&str, usize> = m.endurants.iter().enumerate().map(|(i, e)| (e.name.as_str(), i)).collect();
    let mut seen_sets: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut cycles = Vec::new();
    // 0 unvisited, 1 on stack, 2 done
    let mut state = vec![0u8; m.endurants.len()];
    let mut stack: Vec<usize> = Vec::new();

    fn visit(
        m: &DomainModel,
        order: &BTreeMap<&str, usize>,
        u: usize,
        state: &mut [u8],
        stack: &mut Vec<usize>,
        seen: &mut BTreeSet<Vec<String>>,
        cycles: &mut Vec<Vec<String>>,
    ) {
        state[u] = 1;
        stack.push(u);
        for c in m.endurants[u].children() {
            let Some(&v) = order.get(c.as_str()) else { continue };
            match state[v] {
                0 => visit(m, order, v, state, stack, seen, cycles),
                1 => {
                    let pos = stack.iter().position(|&x| x == v).expect("on stack");
                    let mut members: Vec<usize> = stack[pos..].to_vec();
                    let start = members.iter().enumerate().min_by_key(|(_, &x)| x).map(|(i, _)| i).unwrap_or(0);
                    members.rotate_left(start);
                    let names: Vec<String> = members.iter().map(|&i| m.endurants[i].name.clone()).collect();
                    let mut key = names.clone();
                    key.sort();
                    if seen.insert(key) {
                        cycles.push(names);
                    }
                }
                _ => {}
            }
        }
        stack.pop();
        state[u] = 2;
    }

    for u in 0..m.endurants.len() {
        if state[u] == 0 {
            visit(m, &order, u, &mut state, &mut stack, &mut seen_sets, &mut cycles);
        }
    }
    cycles
}

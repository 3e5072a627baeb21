//! Channel and data-flow planning shared by the checker and the compiler.

use std::collections::{BTreeMap, BTreeSet};

use crate::analysis::wellformed_related as related;
use crate::diag::Diagnostic;
use crate::model::*;

use super::*;

/// A message element's journey: read on the sender, converted by
/// `payload.conversions`, received, converted by `receiver_conv` and stored in
/// `target`.
#[derive(Debug, Clone)]
struct Delivery {
    axiom: String,
    target: String,
    index: usize,
    receiver_conv: Vec<String>,
    kind: String,
}

#[derive(Debug, Clone)]
struct InterChannel {
    name: String,
    sender: String,
    receiver: String,
    payload: Vec<Value>,
    deliveries: Vec<Delivery>,
}

impl InterChannel {
    fn message(&self) -> Vec<String> {
        self.payload.iter().map(|v| v.kind.clone()).collect()
    }
}

pub(crate) struct Plan<'m> {
    model: &'m DomainModel,
    inter: BTreeMap<String, InterChannel>,
    /// Same-part axiom updates: (sort, target attr) -> (axiom, value).
    local: BTreeMap<(String, String), (String, Value)>,
    pub(crate) diags: Vec<Diagnostic>,
}

pub(crate) fn preflight(model: &DomainModel, map: &SourceMap) -> Vec<Diagnostic> {
    Plan::build(model, map).diags
}

fn source_value(e: &EndurantDecl, attr: &str) -> Option<ValueRef> {
    let a = e.attribute(attr)?;
    Some(if a.category.is_external() {
        ValueRef::External { attr: a.name.clone() }
    } else if a.category.is_controllable() {
        ValueRef::Controllable { attr: a.name.clone() }
    } else {
        ValueRef::Static { attr: a.name.clone() }
    })
}

fn inter_var(channel: &str) -> String {
    format!("{}′", channel.strip_suffix("_ch").unwrap_or(channel))
}

impl<'m> Plan<'m> {
    pub(crate) fn build(model: &'m DomainModel, map: &SourceMap) -> Self {
        let mut plan = Plan { model, inter: BTreeMap::new(), local: BTreeMap::new(), diags: Vec::new() };
        let err = |diags: &mut Vec<Diagnostic>, code: &'static str, msg: String, key: &str| {
            diags.push(Diagnostic::error(code, msg, map.span(key)));
        };
        let parts: Vec<&EndurantDecl> = model.parts().collect();

        let mut process_names: BTreeMap<String, &str> = BTreeMap::new();
        for p in &parts {
            if let Some(other) = process_names.insert(p.process_name(), &p.name) {
                err(&mut plan.diags, "E306", format!("`{}` and `{other}` both compile to behaviour `{}`", p.name, p.process_name()), &format!("behaviour:{}", p.name));
            }
        }

        let mut external: BTreeMap<String, (&str, &str)> = BTreeMap::new();
        for p in &parts {
            for a in &p.attributes {
                let key = format!("attr:{}.{}", p.name, a.name);
                if (a.category == Category::Static || a.category.is_controllable()) && a.init.is_none() {
                    err(&mut plan.diags, "E303", format!("{} attribute `{}.{}` needs an `init` value", a.category.keyword(), p.name, a.name), &key);
                }
                if a.category.is_external() {
                    if let Some((s, _)) = external.insert(a.channel_name(), (&p.name, &a.quantity)) {
                        err(
                            &mut plan.diags,
                            "E304",
                            format!("external attribute `{}` of `{}` would share channel `{}` with `{s}`", a.name, p.name, a.channel_name()),
                            &key,
                        );
                    }
                }
            }
        }

        // Directed pairs of related parts and the channel name each would use.
        let mut pairs: BTreeMap<String, (&EndurantDecl, &EndurantDecl)> = BTreeMap::new();
        for p in &parts {
            for q in &parts {
                if p.name == q.name || !related(p, q) {
                    continue;
                }
                let name = format!("{}_{}_ch", p.channel_abbrev(), q.channel_abbrev());
                if let Some((p0, q0)) = pairs.insert(name.clone(), (p, q)) {
                    err(
                        &mut plan.diags,
                        "E306",
                        format!("channel `{name}` would connect both {}→{} and {}→{}", p0.name, q0.name, p.name, q.name),
                        &format!("behaviour:{}", p.name),
                    );
                }
                if external.contains_key(&name) {
                    err(&mut plan.diags, "E304", format!("`{name}` names both an attribute channel and a behaviour channel"), &format!("sort:{}", p.name));
                }
            }
        }
        let pair_name = |p: &str, q: &str| pairs.iter().find(|(_, (a, b))| a.name == p && b.name == q).map(|(n, _)| n.clone());

        for ax in &model.axioms {
            let Some(target) = model.endurant(&ax.target_sort) else { continue };
            for (t, src) in ax.targets.iter().zip(&ax.sources) {
                let Some(se) = model.endurant(&src.sort) else { continue };
                let Some(source) = source_value(se, &src.attr) else { continue };
                let Some(ta) = target.attribute(t) else { continue };
                if se.name == target.name {
                    let v = Value { source, conversions: src.chain.clone(), kind: ta.quantity.clone() };
                    plan.local.insert((target.name.clone(), t.clone()), (ax.name.clone(), v));
                    continue;
                }
                let Some(name) = pair_name(&se.name, &target.name) else { continue };
                // The sender records (a2r…); display conversions happen on
                // the receiving side.
                let split = match src.chain.first().and_then(|c| model.conversion(c)) {
                    Some(c) if c.inverse_of.is_none() => 1,
                    _ => 0,
                };
                let source_kind = se.attribute(&src.attr).map(|a| a.quantity.clone()).unwrap_or_default();
                let kind = if split == 1 {
                    model.conversion(&src.chain[0]).map(|c| c.to.clone()).unwrap_or_default()
                } else {
                    source_kind
                };
                let ch = plan.inter.entry(name.clone()).or_insert_with(|| InterChannel {
                    name: name.clone(),
                    sender: se.name.clone(),
                    receiver: target.name.clone(),
                    payload: Vec::new(),
                    deliveries: Vec::new(),
                });
                ch.deliveries.push(Delivery {
                    axiom: ax.name.clone(),
                    target: t.clone(),
                    index: ch.payload.len(),
                    receiver_conv: src.chain[split..].to_vec(),
                    kind: ta.quantity.clone(),
                });
                ch.payload.push(Value { source, conversions: src.chain[..split].to_vec(), kind });
            }
        }

        for decl in &model.channels {
            let key = format!("channel:{}", decl.name);
            if let Some((sort, kind)) = external.get(&decl.name) {
                if decl.message != [kind.to_string()] {
                    err(
                        &mut plan.diags,
                        "E305",
                        format!("channel `{}` of `{sort}` carries {kind}, not {}", decl.name, decl.message.join(" x ")),
                        &key,
                    );
                }
            } else if let Some(&(p, q)) = pairs.get(&decl.name) {
                match plan.inter.get(&decl.name) {
                    Some(ch) => {
                        if ch.message() != decl.message {
                            err(
                                &mut plan.diags,
                                "E305",
                                format!("channel `{}` is declared {} but its axioms send {}", decl.name, decl.message.join(" x "), ch.message().join(" x ")),
                                &key,
                            );
                        }
                    }
                    None => {
                        // No axiom flows this way: send the first attribute of
                        // each declared kind.
                        let mut payload = Vec::new();
                        for k in &decl.message {
                            match p.attributes.iter().find(|a| &a.quantity == k) {
                                Some(a) => payload.push(Value {
                                    source: source_value(p, &a.name).expect("attribute exists"),
                                    conversions: Vec::new(),
                                    kind: k.clone(),
                                }),
                                None => err(&mut plan.diags, "E305", format!("`{}` has no attribute of kind {k} to send on `{}`", p.name, decl.name), &key),
                            }
                        }
                        if payload.len() == decl.message.len() {
                            plan.inter.insert(
                                decl.name.clone(),
                                InterChannel { name: decl.name.clone(), sender: p.name.clone(), receiver: q.name.clone(), payload, deliveries: Vec::new() },
                            );
                        }
                    }
                }
            } else {
                err(&mut plan.diags, "E307", format!("channel `{}` matches no attribute and no related pair of parts", decl.name), &key);
            }
        }

        let mut reported = BTreeSet::new();
        for (p, q) in pairs.values() {
            let key = if p.name < q.name { (p.name.clone(), q.name.clone()) } else { (q.name.clone(), p.name.clone()) };
            let linked = plan.inter.values().any(|c| (c.sender == p.name && c.receiver == q.name) || (c.sender == q.name && c.receiver == p.name));
            if !linked && reported.insert(key) {
                err(
                    &mut plan.diags,
                    "E301",
                    format!("`{}` and `{}` are related but nothing is sent between them; declare a channel or an axiom", p.name, q.name),
                    &format!("mereo:{}", p.name),
                );
            }
        }
        plan
    }

    fn process_of(&self, sort: &str) -> String {
        self.model.endurant(sort).map(EndurantDecl::process_name).unwrap_or_else(|| sort.to_lowercase())
    }

    /// All channels, external first (part and attribute order), then inter
    /// channels by name.
    pub(crate) fn channel_infos(&self) -> Vec<ChannelInfo> {
        let mut out = Vec::new();
        for p in self.model.parts() {
            for a in p.attributes.iter().filter(|a| a.category.is_external()) {
                out.push(ChannelInfo {
                    name: a.channel_name(),
                    message: vec![a.quantity.clone()],
                    role: ChannelRole::External,
                    sender: None,
                    receiver: p.process_name(),
                });
            }
        }
        for ch in self.inter.values() {
            out.push(ChannelInfo {
                name: ch.name.clone(),
                message: ch.message(),
                role: ChannelRole::Inter,
                sender: Some(self.process_of(&ch.sender)),
                receiver: self.process_of(&ch.receiver),
            });
        }
        out
    }

    /// Channels with at least one endpoint among the graph's processes.
    pub(crate) fn channels_touching(&self, g: &ProcessGraph) -> Vec<ChannelInfo> {
        let procs: BTreeSet<String> = g.processes().iter().map(|p| p.name.clone()).collect();
        self.channel_infos()
            .into_iter()
            .filter(|c| procs.contains(&c.receiver) || c.sender.as_ref().is_some_and(|s| procs.contains(s)))
            .collect()
    }

    fn groups(&self, p: &EndurantDecl) -> Vec<ControllableGroup> {
        let controllable: Vec<&AttributeDecl> = p.attributes.iter().filter(|a| a.category.is_controllable()).collect();
        let mut groups = Vec::new();
        let mut placed = BTreeSet::new();
        for ax in self.model.axioms.iter().filter(|a| a.target_sort == p.name) {
            let attrs: Vec<&AttributeDecl> = controllable.iter().copied().filter(|a| ax.targets.contains(&a.name)).collect();
            if attrs.is_empty() {
                continue;
            }
            placed.extend(attrs.iter().map(|a| a.name.clone()));
            groups.push(ControllableGroup {
                name: ax.name.clone(),
                axiom: Some(ax.name.clone()),
                attrs: attrs.iter().map(|a| a.name.clone()).collect(),
                kinds: attrs.iter().map(|a| a.quantity.clone()).collect(),
            });
        }
        let rest: Vec<&AttributeDecl> = controllable.into_iter().filter(|a| !placed.contains(&a.name)).collect();
        if !rest.is_empty() {
            groups.push(ControllableGroup {
                name: "ca".into(),
                axiom: None,
                attrs: rest.iter().map(|a| a.name.clone()).collect(),
                kinds: rest.iter().map(|a| a.quantity.clone()).collect(),
            });
        }
        groups
    }

    pub(crate) fn signature(&self, p: &EndurantDecl) -> BehaviourSignature {
        let mut in_channels: Vec<String> = p.attributes.iter().filter(|a| a.category.is_external()).map(AttributeDecl::channel_name).collect();
        in_channels.extend(self.inter.values().filter(|c| c.receiver == p.name).map(|c| c.name.clone()));
        BehaviourSignature {
            uid_param: p.id_type.clone().unwrap_or_default(),
            mereology_param: p.mereology.clone().unwrap_or(MereologyExpr::Empty),
            static_params: p.attributes.iter().filter(|a| a.category == Category::Static).map(|a| a.name.clone()).collect(),
            controllable_params: self.groups(p),
            in_channels,
            out_channels: self.inter.values().filter(|c| c.sender == p.name).map(|c| c.name.clone()).collect(),
            never_terminates: true,
        }
    }

    fn process(&self, p: &EndurantDecl, composite_core: bool) -> ProcessDef {
        let signature = self.signature(p);
        let mut ops: Vec<StepOp> = p
            .attributes
            .iter()
            .filter(|a| a.category.is_external())
            .map(|a| StepOp::Receive { channel: a.channel_name(), var: a.name.to_lowercase(), role: ChannelRole::External })
            .collect();
        // Inter-behaviour operations in one global order (by channel name)
        // so that synchronous rendezvous cannot deadlock.
        let mut updates = Vec::new();
        for ch in self.inter.values() {
            if ch.sender == p.name {
                ops.push(StepOp::Send { channel: ch.name.clone(), payload: ch.payload.clone() });
            } else if ch.receiver == p.name {
                let var = inter_var(&ch.name);
                ops.push(StepOp::Receive { channel: ch.name.clone(), var: var.clone(), role: ChannelRole::Inter });
                for d in &ch.deliveries {
                    updates.push((
                        d.axiom.clone(),
                        Update {
                            attr: d.target.clone(),
                            value: Value { source: ValueRef::Received { var: var.clone(), index: d.index }, conversions: d.receiver_conv.clone(), kind: d.kind.clone() },
                        },
                    ));
                }
            }
        }
        for ((sort, attr), (axiom, v)) in &self.local {
            if sort == &p.name {
                updates.push((axiom.clone(), Update { attr: attr.clone(), value: v.clone() }));
            }
        }
        // Updates follow the controllable parameter order.
        let order: Vec<&String> = signature.controllable_attrs().collect();
        updates.sort_by_key(|(_, u)| order.iter().position(|a| **a == u.attr));
        let updates = updates.into_iter().map(|(_, u)| u).collect();

        let value = |a: &AttributeDecl| (a.name.clone(), a.init.clone().unwrap_or_else(Decimal::zero));
        ProcessDef {
            name: p.process_name(),
            sort: p.name.clone(),
            uid_placeholder: p.uid_placeholder(),
            params: self.params(p),
            static_consts: p.attributes.iter().filter(|a| a.category == Category::Static).map(value).collect(),
            programmable_args: signature.controllable_attrs().cloned().collect(),
            init: p.attributes.iter().filter(|a| a.category.is_controllable()).map(value).collect(),
            signature,
            body: CoreStep { ops, updates },
            composite_core,
        }
    }

    fn placeholder(&self, id: &str) -> String {
        self.model.sort_with_id(id).map(EndurantDecl::uid_placeholder).unwrap_or_else(|| format!("{}π", id.to_lowercase()))
    }

    fn mereo_params(&self, m: &MereologyExpr) -> Option<String> {
        match m {
            MereologyExpr::Empty => None,
            MereologyExpr::Id(id) => Some(self.placeholder(id)),
            MereologyExpr::Set(id) => Some(format!("{{{}}}", self.placeholder(id))),
            MereologyExpr::Product(items) => {
                let inner: Vec<String> = items.iter().filter_map(|i| self.mereo_params(i)).collect();
                Some(format!("({})", inner.join(",")))
            }
        }
    }

    fn params(&self, p: &EndurantDecl) -> String {
        let mut s = p.uid_placeholder();
        if let Some(m) = p.mereology.as_ref().and_then(|m| self.mereo_params(m)) {
            s.push(',');
            s.push_str(&m);
        }
        s
    }

    fn has_own_behaviour(&self, p: &EndurantDecl) -> bool {
        !p.attributes.is_empty() || self.inter.values().any(|c| c.sender == p.name || c.receiver == p.name)
    }

    pub(crate) fn node(&self, sort: &str, opts: CompileOptions, stack: &mut Vec<String>) -> Result<ProcessNode, CompileError> {
        if stack.iter().any(|s| s == sort) {
            let mut path = stack.clone();
            path.push(sort.into());
            return Err(CompileError::Invalid(vec![Diagnostic::error(
                "E302",
                format!("composite cycle {}", path.join(" -> ")),
                crate::diag::SourceSpan::origin("<model>"),
            )]));
        }
        let p = self.model.endurant(sort).ok_or_else(|| CompileError::UnknownSort(sort.into()))?;
        stack.push(sort.into());
        let mut children = Vec::new();
        for c in p.children() {
            children.push(self.node(c, opts, stack)?);
        }
        stack.pop();
        let core = if !p.is_composite() {
            Some(self.process(p, false))
        } else if opts.always_core || children.is_empty() || self.has_own_behaviour(p) {
            Some(self.process(p, true))
        } else {
            None
        };
        Ok(ProcessNode { sort: sort.into(), core, children })
    }
}

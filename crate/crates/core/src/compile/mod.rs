//! Parts to behaviours: composite parts become a core process in parallel
//! with their compiled children, atomic parts a tail-recursive core. The core
//! step reads its inputs, moves axiom-declared conversions across channels and
//! recurses with updated controllable attributes.

mod json;
mod plan;
mod print;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::decimal::Decimal;
use crate::diag::{has_errors, Diagnostic};
use crate::model::*;

pub use json::{graph_json, GraphDoc};
pub(crate) use plan::preflight;
pub use print::{print_process, value_text};

use plan::Plan;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CompileOptions {
    /// Emit a core process for every composite, even one with no attributes
    /// or channels of its own.
    pub always_core: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("`{0}` is not a part")]
    NotAPart(String),
    #[error("model is not well-formed ({} errors)", .0.iter().filter(|d| d.is_error()).count())]
    Invalid(Vec<Diagnostic>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelRole {
    /// Carries an inert, reactive or autonomous attribute value in from the
    /// environment.
    External,
    /// Between two behaviours whose parts are related by mereology.
    Inter,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChannelInfo {
    pub name: String,
    pub message: Vec<String>,
    pub role: ChannelRole,
    /// Sending process; `None` for the environment.
    pub sender: Option<String>,
    pub receiver: String,
}

impl ChannelInfo {
    pub fn decl(&self) -> ChannelDecl {
        ChannelDecl { name: self.name.clone(), message: self.message.clone() }
    }
}

/// Controllable attributes threaded through recursion together: those fixed
/// by one axiom, in attribute order, or the remainder (`axiom` is `None`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ControllableGroup {
    pub name: String,
    pub axiom: Option<String>,
    pub attrs: Vec<String>,
    pub kinds: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BehaviourSignature {
    pub uid_param: String,
    #[serde(serialize_with = "json::display_str")]
    pub mereology_param: MereologyExpr,
    pub static_params: Vec<String>,
    pub controllable_params: Vec<ControllableGroup>,
    pub in_channels: Vec<String>,
    pub out_channels: Vec<String>,
    pub never_terminates: bool,
}

impl BehaviourSignature {
    pub fn controllable_attrs(&self) -> impl Iterator<Item = &String> {
        self.controllable_params.iter().flat_map(|g| g.attrs.iter())
    }

    pub fn channels(&self) -> impl Iterator<Item = &String> {
        self.in_channels.iter().chain(&self.out_channels)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "from", rename_all = "lowercase")]
pub enum ValueRef {
    /// Received this iteration on the attribute's external channel.
    External { attr: String },
    Static { attr: String },
    Controllable { attr: String },
    /// Element `index` of the tuple bound to `var` by an inter receive.
    Received { var: String, index: usize },
}

/// `conversions` applied left to right to `source`, giving a value of `kind`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Value {
    pub source: ValueRef,
    pub conversions: Vec<String>,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum StepOp {
    Receive { channel: String, var: String, role: ChannelRole },
    Send { channel: String, payload: Vec<Value> },
}

impl StepOp {
    pub fn channel(&self) -> &str {
        match self {
            StepOp::Receive { channel, .. } | StepOp::Send { channel, .. } => channel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Update {
    pub attr: String,
    pub value: Value,
}

/// One turn of the tail recursion: channel operations in order, then the new
/// controllable values, then the recursive call.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CoreStep {
    pub ops: Vec<StepOp>,
    pub updates: Vec<Update>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProcessDef {
    pub name: String,
    pub sort: String,
    pub uid_placeholder: String,
    /// Identifier parameters as written in the head, e.g. `dπ,(pπ,tdπ)`.
    pub params: String,
    pub signature: BehaviourSignature,
    pub static_consts: Vec<(String, Decimal)>,
    pub programmable_args: Vec<String>,
    /// Initial values of the controllable attributes.
    pub init: Vec<(String, Decimal)>,
    pub body: CoreStep,
    /// True for the core behaviour of a composite part.
    pub composite_core: bool,
}

impl ProcessDef {
    /// Kind of an attribute of this process's part, looked up in `model`.
    pub fn attr_kind<'m>(&self, model: &'m DomainModel, attr: &str) -> Option<&'m str> {
        model.endurant(&self.sort)?.attribute(attr).map(|a| a.quantity.as_str())
    }

    /// Every body channel is in the signature and the body ends in recursion
    /// by construction.
    pub fn is_consistent(&self) -> bool {
        let sig: BTreeSet<&str> = self.signature.channels().map(String::as_str).collect();
        self.signature.never_terminates && self.body.ops.iter().all(|op| sig.contains(op.channel()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProcessNode {
    pub sort: String,
    pub core: Option<ProcessDef>,
    pub children: Vec<ProcessNode>,
}

impl ProcessNode {
    /// Height of the parallel-composition tree rooted here.
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(ProcessNode::depth).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(ProcessNode::node_count).sum::<usize>()
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a ProcessDef>) {
        if let Some(c) = &self.core {
            out.push(c);
        }
        for ch in &self.children {
            ch.collect(out);
        }
    }
}

/// Compiled behaviours for one or more part trees with the channels they use.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ProcessGraph {
    pub roots: Vec<ProcessNode>,
    pub channels: Vec<ChannelInfo>,
}

impl ProcessGraph {
    /// Processes in pre-order (cores before children).
    pub fn processes(&self) -> Vec<&ProcessDef> {
        let mut out = Vec::new();
        for r in &self.roots {
            r.collect(&mut out);
        }
        out
    }

    pub fn process(&self, name: &str) -> Option<&ProcessDef> {
        self.processes().into_iter().find(|p| p.name == name)
    }

    pub fn channel(&self, name: &str) -> Option<&ChannelInfo> {
        self.channels.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ProcessGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_process(self))
    }
}

fn validated(model: &DomainModel) -> Result<(), CompileError> {
    let diags = crate::analysis::check_wellformed(model);
    if has_errors(&diags) {
        Err(CompileError::Invalid(diags))
    } else {
        Ok(())
    }
}

fn part<'m>(model: &'m DomainModel, name: &str) -> Result<&'m EndurantDecl, CompileError> {
    let e = model.endurant(name).ok_or_else(|| CompileError::UnknownSort(name.into()))?;
    if e.kind != EndurantKind::Part {
        return Err(CompileError::NotAPart(name.into()));
    }
    Ok(e)
}

/// The channels a compiled model uses: one per external attribute, then one
/// per directed pair of related behaviours that communicate, by name.
pub fn derive_channels(model: &DomainModel) -> Result<Vec<ChannelDecl>, CompileError> {
    validated(model)?;
    Ok(Plan::build(model, &SourceMap::default()).channel_infos().iter().map(ChannelInfo::decl).collect())
}

pub fn derive_signature(model: &DomainModel, sort: &str) -> Result<BehaviourSignature, CompileError> {
    let p = part(model, sort)?;
    validated(model)?;
    Ok(Plan::build(model, &SourceMap::default()).signature(p))
}

/// Compiles the part tree rooted at `sort`.
pub fn compile_process(model: &DomainModel, sort: &str, opts: CompileOptions) -> Result<ProcessGraph, CompileError> {
    part(model, sort)?;
    validated(model)?;
    let plan = Plan::build(model, &SourceMap::default());
    let root = plan.node(sort, opts, &mut Vec::new())?;
    let mut g = ProcessGraph { roots: vec![root], channels: Vec::new() };
    g.channels = plan.channels_touching(&g);
    Ok(g)
}

/// Compiles every root part tree of the model.
pub fn compile_model(model: &DomainModel, opts: CompileOptions) -> Result<ProcessGraph, CompileError> {
    validated(model)?;
    let plan = Plan::build(model, &SourceMap::default());
    let mut g = ProcessGraph::default();
    for r in model.roots() {
        g.roots.push(plan.node(&r.name, opts, &mut Vec::new())?);
    }
    g.channels = plan.channels_touching(&g);
    Ok(g)
}

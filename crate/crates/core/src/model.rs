//! Value types for a domain description: endurant sorts with unique
//! identifiers, mereologies and attributes, plus the quantity kinds,
//! conversions, channels, axioms and observers declared alongside them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::decimal::Decimal;
use crate::diag::SourceSpan;
use crate::units::Role;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EndurantKind {
    Part,
    Component,
    Material,
}

impl EndurantKind {
    pub fn keyword(self) -> &'static str {
        match self {
            EndurantKind::Part => "part",
            EndurantKind::Component => "component",
            EndurantKind::Material => "material",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Discreteness {
    Discrete,
    Continuous,
}

impl Discreteness {
    pub fn keyword(self) -> &'static str {
        match self {
            Discreteness::Discrete => "discrete",
            Discreteness::Continuous => "continuous",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Structure {
    Atomic,
    Composite(Vec<String>),
}

/// Expression over unique-identifier types: a single id type, a finite set of
/// one, a product of those, or nothing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum MereologyExpr {
    Empty,
    Id(String),
    Set(String),
    Product(Vec<MereologyExpr>),
}

impl MereologyExpr {
    /// Id types mentioned, in order of appearance.
    pub fn leaves(&self) -> Vec<&str> {
        match self {
            MereologyExpr::Empty => Vec::new(),
            MereologyExpr::Id(n) | MereologyExpr::Set(n) => vec![n.as_str()],
            MereologyExpr::Product(items) => items.iter().flat_map(MereologyExpr::leaves).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, MereologyExpr::Empty)
    }
}

impl fmt::Display for MereologyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MereologyExpr::Empty => f.write_str("empty"),
            MereologyExpr::Id(n) => f.write_str(n),
            MereologyExpr::Set(n) => write!(f, "set {n}"),
            MereologyExpr::Product(items) => {
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" x ")?;
                    }
                    write!(f, "{it}")?;
                }
                Ok(())
            }
        }
    }
}

/// Attribute categories: static, or one of the dynamic categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Static,
    Inert,
    Reactive,
    Autonomous,
    Biddable,
    Programmable,
}

impl Category {
    pub const ALL: [Category; 6] = [
        Category::Static,
        Category::Inert,
        Category::Reactive,
        Category::Autonomous,
        Category::Biddable,
        Category::Programmable,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Category::Static => "static",
            Category::Inert => "inert",
            Category::Reactive => "reactive",
            Category::Autonomous => "autonomous",
            Category::Biddable => "biddable",
            Category::Programmable => "programmable",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Category> {
        Category::ALL.into_iter().find(|c| c.keyword() == s)
    }

    /// Values supplied from outside the behaviour through an attribute channel.
    pub fn is_external(self) -> bool {
        matches!(self, Category::Inert | Category::Reactive | Category::Autonomous)
    }

    /// Values threaded through the behaviour's tail recursion.
    pub fn is_controllable(self) -> bool {
        matches!(self, Category::Biddable | Category::Programmable)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AttributeDecl {
    pub name: String,
    pub quantity: String,
    pub category: Category,
    /// Constant for static attributes, initial value for controllable ones.
    pub init: Option<Decimal>,
}

impl AttributeDecl {
    pub fn new(name: &str, quantity: &str, category: Category) -> Self {
        Self { name: name.into(), quantity: quantity.into(), category, init: None }
    }

    pub fn with_init(mut self, v: Decimal) -> Self {
        self.init = Some(v);
        self
    }

    pub fn channel_name(&self) -> String {
        external_channel_name(&self.name)
    }
}

pub fn external_channel_name(attr: &str) -> String {
    format!("attr_{attr}_ch")
}

/// Optional naming of the behaviour compiled from a part.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct BehaviourNaming {
    pub process: Option<String>,
    pub channel_abbrev: Option<String>,
    pub uid_placeholder: Option<String>,
}

impl BehaviourNaming {
    pub fn is_default(&self) -> bool {
        self == &Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EndurantDecl {
    pub name: String,
    pub kind: EndurantKind,
    pub discreteness: Discreteness,
    pub structure: Structure,
    pub id_type: Option<String>,
    pub mereology: Option<MereologyExpr>,
    pub attributes: Vec<AttributeDecl>,
    pub behaviour: BehaviourNaming,
}

/// Ways an endurant can break the kind / discreteness / identity / mereology
/// matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixViolation {
    MaterialDiscrete,
    MaterialWithMereology,
    MaterialWithIdentifier,
    ComponentWithMereology,
    ComponentContinuous,
    ComponentWithoutIdentifier,
    PartContinuous,
    PartWithoutIdentifier,
    PartWithoutMereology,
    NonPartComposite,
}

impl fmt::Display for MatrixViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixViolation::MaterialDiscrete => "materials are continuous",
            MatrixViolation::MaterialWithMereology => "materials have no mereology",
            MatrixViolation::MaterialWithIdentifier => "materials have no unique identifier",
            MatrixViolation::ComponentWithMereology => "components have no mereology",
            MatrixViolation::ComponentContinuous => "components are discrete",
            MatrixViolation::ComponentWithoutIdentifier => "components need a unique identifier",
            MatrixViolation::PartContinuous => "parts are discrete",
            MatrixViolation::PartWithoutIdentifier => "parts need a unique identifier",
            MatrixViolation::PartWithoutMereology => "parts need a mereology (possibly `empty`)",
            MatrixViolation::NonPartComposite => "only parts can be composite",
        })
    }
}

impl EndurantKind {
    pub fn default_discreteness(self) -> Discreteness {
        match self {
            EndurantKind::Material => Discreteness::Continuous,
            _ => Discreteness::Discrete,
        }
    }
}

impl EndurantDecl {
    pub fn new(name: &str, kind: EndurantKind) -> Self {
        Self {
            name: name.into(),
            kind,
            discreteness: kind.default_discreteness(),
            structure: Structure::Atomic,
            id_type: None,
            mereology: None,
            attributes: Vec::new(),
            behaviour: BehaviourNaming::default(),
        }
    }

    /// An atomic part with the given id type and empty mereology.
    pub fn part(name: &str, id: &str) -> Self {
        let mut p = Self::new(name, EndurantKind::Part);
        p.id_type = Some(id.into());
        p.mereology = Some(MereologyExpr::Empty);
        p
    }

    pub fn children(&self) -> &[String] {
        match &self.structure {
            Structure::Atomic => &[],
            Structure::Composite(c) => c,
        }
    }

    pub fn is_composite(&self) -> bool {
        matches!(self.structure, Structure::Composite(_))
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeDecl> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn process_name(&self) -> String {
        self.behaviour.process.clone().unwrap_or_else(|| self.name.to_lowercase())
    }

    pub fn channel_abbrev(&self) -> String {
        self.behaviour.channel_abbrev.clone().unwrap_or_else(|| self.name.to_lowercase())
    }

    pub fn uid_placeholder(&self) -> String {
        let base = self.behaviour.uid_placeholder.clone().unwrap_or_else(|| self.channel_abbrev());
        format!("{base}π")
    }

    pub fn matrix_violations(&self) -> Vec<MatrixViolation> {
        use MatrixViolation::*;
        let mut v = Vec::new();
        match self.kind {
            EndurantKind::Material => {
                if self.discreteness == Discreteness::Discrete {
                    v.push(MaterialDiscrete);
                }
                if self.mereology.is_some() {
                    v.push(MaterialWithMereology);
                }
                if self.id_type.is_some() {
                    v.push(MaterialWithIdentifier);
                }
            }
            EndurantKind::Component => {
                if self.discreteness == Discreteness::Continuous {
                    v.push(ComponentContinuous);
                }
                if self.mereology.is_some() {
                    v.push(ComponentWithMereology);
                }
                if self.id_type.is_none() {
                    v.push(ComponentWithoutIdentifier);
                }
            }
            EndurantKind::Part => {
                if self.discreteness == Discreteness::Continuous {
                    v.push(PartContinuous);
                }
                if self.id_type.is_none() {
                    v.push(PartWithoutIdentifier);
                }
                if self.mereology.is_none() {
                    v.push(PartWithoutMereology);
                }
            }
        }
        if self.kind != EndurantKind::Part && self.is_composite() {
            v.push(NonPartComposite);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct QuantityDecl {
    pub name: String,
    pub role: Role,
    pub unit: String,
    pub interval: Option<String>,
    pub mean: Option<String>,
    pub ordered: bool,
}

/// `to = scale * from + offset`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Affine {
    pub scale: Decimal,
    pub offset: Decimal,
}

impl Affine {
    pub fn new(scale: Decimal, offset: Decimal) -> Self {
        Self { scale, offset }
    }

    pub fn apply(&self, x: &Decimal) -> Decimal {
        &(&self.scale * x) + &self.offset
    }

    /// `self ∘ inner`, i.e. `x ↦ self(inner(x))`.
    pub fn compose(&self, inner: &Affine) -> Affine {
        Affine { scale: &self.scale * &inner.scale, offset: &(&self.scale * &inner.offset) + &self.offset }
    }

    pub fn is_identity(&self) -> bool {
        self.scale == Decimal::one() && self.offset.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ConversionDecl {
    pub name: String,
    pub from: String,
    pub to: String,
    pub inverse_of: Option<String>,
    pub map: Affine,
}

impl ConversionDecl {
    /// Actual-to-recording conversions (`a2r…`) have no inverse: recordings
    /// cannot be turned back into the phenomena they record.
    pub fn is_recording(&self) -> bool {
        self.name.starts_with("a2r")
    }

    /// Recording/display conversions (`r2d…`, `d2r…`) come in inverse pairs.
    pub fn is_display(&self) -> bool {
        self.name.starts_with("r2d") || self.name.starts_with("d2r")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ChannelDecl {
    pub name: String,
    /// Kinds of the message tuple; a single element for attribute channels.
    pub message: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AxiomSource {
    pub sort: String,
    pub attr: String,
    /// Conversions applied left to right.
    pub chain: Vec<String>,
}

/// `target_sort.targets[i] = chain_i(sources[i])`, pairwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AxiomDecl {
    pub name: String,
    pub target_sort: String,
    pub targets: Vec<String>,
    pub sources: Vec<AxiomSource>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum ObserverTarget {
    /// `obs_P: E -> P`
    Sort(String),
    /// `uid_P: P -> Π`
    UniqueId(String),
    /// `mereo_P: P -> expr`
    Mereology(MereologyExpr),
    /// `attr_A: E -> AT x value`
    Attribute { quantity: String, category: Category },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ObserverDecl {
    pub name: String,
    pub from: String,
    pub target: ObserverTarget,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct DomainModel {
    pub types: Vec<Vec<String>>,
    pub quantities: Vec<QuantityDecl>,
    pub endurants: Vec<EndurantDecl>,
    pub conversions: Vec<ConversionDecl>,
    pub channels: Vec<ChannelDecl>,
    pub axioms: Vec<AxiomDecl>,
    pub observers: Vec<ObserverDecl>,
    /// Free-text `doc` strings, keyed like [`SourceMap`]; no semantic role.
    pub docs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
}

impl DomainModel {
    pub fn is_empty(&self) -> bool {
        self == &Self::default()
    }

    pub fn endurant(&self, name: &str) -> Option<&EndurantDecl> {
        self.endurants.iter().find(|e| e.name == name)
    }

    pub fn conversion(&self, name: &str) -> Option<&ConversionDecl> {
        self.conversions.iter().find(|c| c.name == name)
    }

    pub fn quantity(&self, name: &str) -> Option<&QuantityDecl> {
        self.quantities.iter().find(|q| q.name == name)
    }

    pub fn channel(&self, name: &str) -> Option<&ChannelDecl> {
        self.channels.iter().find(|c| c.name == name)
    }

    pub fn parts(&self) -> impl Iterator<Item = &EndurantDecl> {
        self.endurants.iter().filter(|e| e.kind == EndurantKind::Part)
    }

    /// The sort whose unique identifier has type `id`.
    pub fn sort_with_id(&self, id: &str) -> Option<&EndurantDecl> {
        self.endurants.iter().find(|e| e.id_type.as_deref() == Some(id))
    }

    /// Sorts not listed as a child of any composite, in declaration order.
    pub fn roots(&self) -> Vec<&EndurantDecl> {
        let children: BTreeSet<&str> = self.endurants.iter().flat_map(|e| e.children().iter().map(String::as_str)).collect();
        self.parts().filter(|e| !children.contains(e.name.as_str())).collect()
    }
}

pub fn model_lookup<'m>(model: &'m DomainModel, name: &str) -> Result<&'m EndurantDecl, ModelError> {
    model.endurant(name).ok_or_else(|| ModelError::UnknownSort(name.to_string()))
}

/// All declared unique-identifier types.
pub fn id_types_of(model: &DomainModel) -> BTreeSet<String> {
    model.endurants.iter().filter_map(|e| e.id_type.clone()).collect()
}

/// Source positions of declarations, keyed `sort:PP`, `attr:PP.LO`,
/// `quantity:LO`, `conversion:a2rLO`, `channel:…`, `axiom:…`, `observer:…`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceMap {
    pub file: String,
    pub spans: BTreeMap<String, SourceSpan>,
}

impl SourceMap {
    pub fn new(file: impl Into<String>) -> Self {
        Self { file: file.into(), spans: BTreeMap::new() }
    }

    pub fn span(&self, key: &str) -> SourceSpan {
        self.spans.get(key).cloned().unwrap_or_else(|| SourceSpan::origin(if self.file.is_empty() { "<model>" } else { &self.file }))
    }
}

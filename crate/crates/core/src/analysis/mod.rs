//! The analysis and description prompts as queries over a parsed model, plus
//! whole-model well-formedness checking.

mod registry;
mod wellformed;

use std::fmt;

use serde::Serialize;

use crate::dsl::printer::{print_observer, print_type_decl};
use crate::model::*;

pub use registry::{model_registry, model_registry_with};
pub use wellformed::{check_wellformed, check_wellformed_with};
pub(crate) use wellformed::related as wellformed_related;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("`{0}` is not composite")]
    NotComposite(String),
    #[error("`{0}` is a material and has no unique identifier")]
    NoIdentifier(String),
    #[error("`{0}` is not a part")]
    NotAPart(String),
}

impl From<ModelError> for AnalysisError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::UnknownSort(s) => AnalysisError::UnknownSort(s),
        }
    }
}

/// Answers to the analysis prompts for one declared sort. Every declared sort
/// is an endurant; `is_atomic` and `is_composite` are both false for
/// components and materials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub is_entity: bool,
    pub is_endurant: bool,
    pub is_perdurant: bool,
    pub is_discrete: bool,
    pub is_continuous: bool,
    pub is_part: bool,
    pub is_component: bool,
    pub is_material: bool,
    pub is_atomic: bool,
    pub is_composite: bool,
}

pub fn classify(model: &DomainModel, name: &str) -> Result<Classification, AnalysisError> {
    let e = model_lookup(model, name)?;
    let is_part = e.kind == EndurantKind::Part;
    Ok(Classification {
        is_entity: true,
        is_endurant: true,
        is_perdurant: false,
        is_discrete: e.discreteness == Discreteness::Discrete,
        is_continuous: e.discreteness == Discreteness::Continuous,
        is_part,
        is_component: e.kind == EndurantKind::Component,
        is_material: e.kind == EndurantKind::Material,
        is_atomic: is_part && !e.is_composite(),
        is_composite: is_part && e.is_composite(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "decl", rename_all = "lowercase")]
pub enum FormalDecl {
    Type { names: Vec<String> },
    Observer(ObserverDecl),
}

impl fmt::Display for FormalDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormalDecl::Type { names } => f.write_str(&print_type_decl(names)),
            FormalDecl::Observer(o) => f.write_str(&print_observer(o)),
        }
    }
}

/// What a description prompt says: a sentence for people and declarations
/// in `.dom` syntax.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DescriptionText {
    pub narrative: String,
    pub formal: Vec<FormalDecl>,
}

impl DescriptionText {
    /// The formal part as `.dom` text, one declaration per line.
    pub fn formal_text(&self) -> String {
        self.formal.iter().map(|d| format!("{d}\n")).collect()
    }

    pub fn observers(&self) -> impl Iterator<Item = &ObserverDecl> {
        self.formal.iter().filter_map(|d| match d {
            FormalDecl::Observer(o) => Some(o),
            FormalDecl::Type { .. } => None,
        })
    }
}

fn english_list(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

/// `obs_Pᵢ: P -> Pᵢ` for each child sort of a composite part.
pub fn observe_part_sorts(model: &DomainModel, name: &str) -> Result<DescriptionText, AnalysisError> {
    let e = model_lookup(model, name)?;
    let Structure::Composite(children) = &e.structure else {
        return Err(AnalysisError::NotComposite(name.into()));
    };
    let mut formal = vec![FormalDecl::Type { names: children.clone() }];
    formal.extend(children.iter().map(|c| {
        FormalDecl::Observer(ObserverDecl { name: format!("obs_{c}"), from: name.into(), target: ObserverTarget::Sort(c.clone()) })
    }));
    let narrative = if children.is_empty() {
        format!("Every {name} is a composite part with no part sorts.")
    } else {
        format!("Every {name} is composed from {}.", english_list(children))
    };
    Ok(DescriptionText { narrative, formal })
}

/// `uid_P: P -> Π` for a part or component.
pub fn observe_unique_identifier(model: &DomainModel, name: &str) -> Result<DescriptionText, AnalysisError> {
    let e = model_lookup(model, name)?;
    if e.kind == EndurantKind::Material {
        return Err(AnalysisError::NoIdentifier(name.into()));
    }
    let Some(id) = &e.id_type else {
        return Err(AnalysisError::NoIdentifier(name.into()));
    };
    Ok(DescriptionText {
        narrative: format!("Each {name} has a unique identifier of type {id}."),
        formal: vec![
            FormalDecl::Type { names: vec![id.clone()] },
            FormalDecl::Observer(ObserverDecl {
                name: format!("uid_{name}"),
                from: name.into(),
                target: ObserverTarget::UniqueId(id.clone()),
            }),
        ],
    })
}

/// `mereo_P: P -> E(Πⱼ, …)` for a part.
pub fn observe_mereology(model: &DomainModel, name: &str) -> Result<DescriptionText, AnalysisError> {
    let e = model_lookup(model, name)?;
    if e.kind != EndurantKind::Part {
        return Err(AnalysisError::NotAPart(name.into()));
    }
    let m = e.mereology.clone().unwrap_or(MereologyExpr::Empty);
    let leaves: Vec<String> = m.leaves().into_iter().map(|l| model.sort_with_id(l).map_or(l, |s| s.name.as_str()).to_string()).collect();
    let narrative = if leaves.is_empty() {
        format!("Every {name} is related to no other part.")
    } else {
        format!("Every {name} is related to {}.", english_list(&leaves))
    };
    Ok(DescriptionText {
        narrative,
        formal: vec![FormalDecl::Observer(ObserverDecl { name: format!("mereo_{name}"), from: name.into(), target: ObserverTarget::Mereology(m) })],
    })
}

/// `attr_A: E -> AT x AV` for each attribute of an endurant, with the
/// attribute kinds as type declarations.
pub fn observe_attributes(model: &DomainModel, name: &str) -> Result<DescriptionText, AnalysisError> {
    let e = model_lookup(model, name)?;
    if e.attributes.is_empty() {
        return Ok(DescriptionText { narrative: format!("Every {name} has no attributes."), formal: Vec::new() });
    }
    let mut kinds: Vec<String> = Vec::new();
    for a in &e.attributes {
        if !kinds.contains(&a.quantity) {
            kinds.push(a.quantity.clone());
        }
    }
    let mut formal = vec![FormalDecl::Type { names: kinds }];
    formal.extend(e.attributes.iter().map(|a| {
        FormalDecl::Observer(ObserverDecl {
            name: format!("attr_{}", a.name),
            from: name.into(),
            target: ObserverTarget::Attribute { quantity: a.quantity.clone(), category: a.category },
        })
    }));
    let described: Vec<String> = e.attributes.iter().map(|a| format!("{} ({})", a.name, a.category.keyword())).collect();
    Ok(DescriptionText { narrative: format!("Every {name} has attributes {}.", english_list(&described)), formal })
}

/// Every prompt that applies to `name`, in prompt order.
pub fn describe_sort(model: &DomainModel, name: &str) -> Result<Vec<DescriptionText>, AnalysisError> {
    let mut out = Vec::new();
    let c = classify(model, name)?;
    if c.is_composite {
        out.push(observe_part_sorts(model, name)?);
    }
    if !c.is_material {
        out.push(observe_unique_identifier(model, name)?);
    }
    if c.is_part {
        out.push(observe_mereology(model, name)?);
    }
    out.push(observe_attributes(model, name)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_str;

    fn sample() -> DomainModel {
        parse_str(
            r#"
part AC composite(PP, DP) { id ACI; mereo empty; }
part PP { id PPI; mereo DPI; attr LO : Real reactive; attr k : Real static init 1; }
part DP { id DPI; mereo PPI; }
material M { attr v : Volume inert; }
component C { id CI; }
"#,
        )
        .unwrap()
    }

    #[test]
    fn classification() {
        let m = sample();
        let ac = classify(&m, "AC").unwrap();
        assert!(ac.is_part && ac.is_composite && ac.is_discrete && !ac.is_atomic);
        let pp = classify(&m, "PP").unwrap();
        assert!(pp.is_part && pp.is_atomic);
        let mat = classify(&m, "M").unwrap();
        assert!(mat.is_material && mat.is_continuous && !mat.is_part && !mat.is_atomic);
        assert_eq!(classify(&m, "XX"), Err(AnalysisError::UnknownSort("XX".into())));
    }

    #[test]
    fn prompts() {
        let m = sample();
        let d = observe_part_sorts(&m, "AC").unwrap();
        assert_eq!(d.formal_text(), "type PP, DP;\nobserve obs_PP : AC -> PP;\nobserve obs_DP : AC -> DP;\n");
        assert_eq!(observe_part_sorts(&m, "PP"), Err(AnalysisError::NotComposite("PP".into())));
        assert_eq!(observe_unique_identifier(&m, "PP").unwrap().formal_text(), "type PPI;\nobserve uid_PP : PP -> PPI;\n");
        assert_eq!(observe_unique_identifier(&m, "M"), Err(AnalysisError::NoIdentifier("M".into())));
        assert_eq!(observe_mereology(&m, "DP").unwrap().formal_text(), "observe mereo_DP : DP -> PPI;\n");
        assert_eq!(observe_mereology(&m, "C"), Err(AnalysisError::NotAPart("C".into())));
        let a = observe_attributes(&m, "PP").unwrap();
        assert_eq!(a.observers().count(), 2);
        assert!(a.formal_text().contains("observe attr_LO : PP -> Real x value reactive;"));
        assert!(observe_attributes(&m, "DP").unwrap().formal.is_empty());
    }
}

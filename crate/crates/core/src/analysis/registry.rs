use crate::diag::Diagnostic;
use crate::model::{DomainModel, SourceMap};
use crate::units::{KindRegistry, QuantityKind, Role};

/// The built-in kinds extended with the model's `quantity` declarations.
/// Declarations that fail to resolve are left out and reported.
pub fn model_registry(model: &DomainModel) -> (KindRegistry, Vec<Diagnostic>) {
    model_registry_with(model, &SourceMap::default())
}

pub fn model_registry_with(model: &DomainModel, map: &SourceMap) -> (KindRegistry, Vec<Diagnostic>) {
    let mut reg = KindRegistry::builtin();
    let mut diags = Vec::new();
    let mut added = Vec::new();
    for q in &model.quantities {
        let span = map.span(&format!("quantity:{}", q.name));
        let mut k = match QuantityKind::from_unit(&q.name, q.role, &q.unit) {
            Ok(k) => k,
            Err(e) => {
                diags.push(Diagnostic::error("E206", format!("quantity `{}`: {e}", q.name), span));
                continue;
            }
        };
        if reg.is_builtin(&q.name) {
            diags.push(Diagnostic::warning("W210", format!("quantity `{}` shadows the built-in kind", q.name), span.clone()));
        }
        if q.role != Role::Point && (q.interval.is_some() || q.mean.is_some() || q.ordered) {
            diags.push(Diagnostic::error(
                "E207",
                format!("`interval`, `mean` and `ordered` apply only to point quantities; `{}` is {}", q.name, q.role.keyword()),
                span,
            ));
        }
        k.interval = q.interval.clone();
        k.mean = q.mean.clone();
        k.ordered_difference = q.ordered;
        reg.insert(k);
        added.push(q);
    }
    // Interval and mean kinds may be declared after the point kind.
    for q in added {
        let span = map.span(&format!("quantity:{}", q.name));
        let k = reg.get(&q.name).expect("inserted above").clone();
        if let Some(i) = &q.interval {
            match reg.get(i) {
                Some(ik) if ik.role == Role::Interval && ik.dimension == k.dimension => {}
                Some(_) => diags.push(Diagnostic::error(
                    "E207",
                    format!("interval kind `{i}` of `{}` must be an interval quantity of dimension {}", q.name, k.dimension),
                    span.clone(),
                )),
                None => diags.push(Diagnostic::error("E207", format!("unknown interval kind `{i}` for `{}`", q.name), span.clone())),
            }
        }
        if let Some(m) = &q.mean {
            match reg.get(m) {
                Some(mk) if mk.dimension == k.dimension => {}
                Some(_) => diags.push(Diagnostic::error(
                    "E207",
                    format!("mean kind `{m}` of `{}` must have dimension {}", q.name, k.dimension),
                    span.clone(),
                )),
                None => diags.push(Diagnostic::error("E207", format!("unknown mean kind `{m}` for `{}`", q.name), span.clone())),
            }
        }
    }
    (reg, diags)
}

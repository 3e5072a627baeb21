//! The operator-permission ledger: which operations are meaningful on which
//! quantity kinds, and what kind they produce.
//!
//! Point kinds (calendar time, absolute temperature) live on an affine scale.
//! They may be subtracted (giving their interval kind), shifted by an interval,
//! compared, and averaged; they may never be added to each other or scaled.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::dimension::Dimension;
use super::kind::{KindRegistry, QuantityKind, Role};
use super::UnitError;
use crate::decimal::Decimal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Operator {
    Add,
    Sub,
    Mul,
    Div,
    Compare,
    Mean,
    ScaleByReal,
    RateOfChange,
}

impl Operator {
    pub const ALL: [Operator; 8] = [
        Operator::Add,
        Operator::Sub,
        Operator::Mul,
        Operator::Div,
        Operator::Compare,
        Operator::Mean,
        Operator::ScaleByReal,
        Operator::RateOfChange,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Operator::Add => "+",
            Operator::Sub => "-",
            Operator::Mul => "*",
            Operator::Div => "/",
            Operator::Compare => "<=>",
            Operator::Mean => "mean",
            Operator::ScaleByReal => "scale",
            Operator::RateOfChange => "rate",
        }
    }
}

/// Runtime side condition attached to an allowed operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Precondition {
    /// `lhs - rhs` requires `rhs <= lhs`.
    RhsNotAfterLhs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ForbidReason {
    PointAddition,
    PointScaling,
    IntervalMinusPoint,
    DimensionMismatch,
    KindMismatch,
    NotAReal,
    NotATimeInterval,
}

impl ForbidReason {
    /// Stable diagnostic code used when a typed expression hits this rule.
    pub fn code(self) -> &'static str {
        match self {
            ForbidReason::PointAddition => "E201",
            ForbidReason::DimensionMismatch => "E204",
            _ => "E202",
        }
    }
}

impl fmt::Display for ForbidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ForbidReason::PointAddition => "point values cannot be added",
            ForbidReason::PointScaling => "point values cannot be multiplied, divided or scaled",
            ForbidReason::IntervalMinusPoint => "an interval minus a point is undefined",
            ForbidReason::DimensionMismatch => "operand dimensions differ",
            ForbidReason::KindMismatch => "operands must be of the same kind",
            ForbidReason::NotAReal => "scaling factor must be a dimensionless real",
            ForbidReason::NotATimeInterval => "rate of change needs a time interval divisor",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Allowed { result: QuantityKind, precondition: Option<Precondition> },
    Forbidden(ForbidReason),
}

impl Verdict {
    fn ok(result: QuantityKind) -> Self {
        Verdict::Allowed { result, precondition: None }
    }

    pub fn result(&self) -> Option<&QuantityKind> {
        match self {
            Verdict::Allowed { result, .. } => Some(result),
            Verdict::Forbidden(_) => None,
        }
    }

    pub fn is_forbidden(&self) -> bool {
        matches!(self, Verdict::Forbidden(_))
    }
}

fn composed(reg: &KindRegistry, lhs: &QuantityKind, rhs: &QuantityKind, op: Operator) -> QuantityKind {
    let (dim, scale, unit) = match op {
        Operator::Mul => (lhs.dimension * rhs.dimension, &lhs.scale * &rhs.scale, format!("({})*({})", lhs.unit, rhs.unit)),
        _ => (lhs.dimension / rhs.dimension, &lhs.scale / &rhs.scale, format!("({})/({})", lhs.unit, rhs.unit)),
    };
    if dim.is_dimensionless() && scale.is_one() {
        return reg.real();
    }
    reg.derived(dim, scale, unit)
}

/// Ledger verdict for `lhs <op> rhs`.
///
/// Every operator and every pair of known kinds yields a verdict; the only
/// error is a kind the registry does not know.
pub fn check_op(reg: &KindRegistry, op: Operator, lhs: &QuantityKind, rhs: &QuantityKind) -> Result<Verdict, UnitError> {
    for k in [lhs, rhs] {
        if !reg.knows(k) {
            return Err(UnitError::UnregisteredKind(k.name.clone()));
        }
    }
    use Role::*;
    let same_dim = lhs.dimension == rhs.dimension;
    let v = match op {
        Operator::Add => match (lhs.role, rhs.role) {
            (Point, Point) => Verdict::Forbidden(ForbidReason::PointAddition),
            _ if !same_dim => Verdict::Forbidden(ForbidReason::DimensionMismatch),
            (Point, _) => Verdict::ok(lhs.clone()),
            (_, Point) => Verdict::ok(rhs.clone()),
            (Plain, Interval) => Verdict::ok(rhs.clone()),
            _ => Verdict::ok(lhs.clone()),
        },
        Operator::Sub => match (lhs.role, rhs.role) {
            _ if !same_dim => Verdict::Forbidden(ForbidReason::DimensionMismatch),
            (Point, Point) => Verdict::Allowed {
                result: reg.interval_of(lhs),
                precondition: lhs.ordered_difference.then_some(Precondition::RhsNotAfterLhs),
            },
            (Point, _) => Verdict::ok(lhs.clone()),
            (_, Point) => Verdict::Forbidden(ForbidReason::IntervalMinusPoint),
            (Plain, Interval) => Verdict::ok(rhs.clone()),
            _ => Verdict::ok(lhs.clone()),
        },
        Operator::Mul => match (lhs.role, rhs.role) {
            (Point, _) | (_, Point) => Verdict::Forbidden(ForbidReason::PointScaling),
            _ if rhs.is_real() => Verdict::ok(lhs.clone()),
            _ if lhs.is_real() => Verdict::ok(rhs.clone()),
            _ => Verdict::ok(composed(reg, lhs, rhs, op)),
        },
        Operator::Div => match (lhs.role, rhs.role) {
            (Point, _) | (_, Point) => Verdict::Forbidden(ForbidReason::PointScaling),
            _ if rhs.is_real() => Verdict::ok(lhs.clone()),
            _ => Verdict::ok(composed(reg, lhs, rhs, op)),
        },
        Operator::Compare => {
            if lhs == rhs {
                Verdict::ok(reg.boolean())
            } else if !same_dim {
                Verdict::Forbidden(ForbidReason::DimensionMismatch)
            } else {
                Verdict::Forbidden(ForbidReason::KindMismatch)
            }
        }
        Operator::Mean => {
            if lhs != rhs {
                Verdict::Forbidden(ForbidReason::KindMismatch)
            } else if lhs.role == Point {
                Verdict::ok(reg.mean_of(lhs))
            } else {
                Verdict::ok(lhs.clone())
            }
        }
        Operator::ScaleByReal => match lhs.role {
            Point => Verdict::Forbidden(ForbidReason::PointScaling),
            _ if !rhs.is_real() => Verdict::Forbidden(ForbidReason::NotAReal),
            _ => Verdict::ok(lhs.clone()),
        },
        Operator::RateOfChange => match lhs.role {
            Point => Verdict::Forbidden(ForbidReason::PointScaling),
            _ if rhs.dimension != Dimension::TIME || rhs.role == Point => Verdict::Forbidden(ForbidReason::NotATimeInterval),
            _ => Verdict::ok(composed(reg, lhs, rhs, Operator::Div)),
        },
    };
    Ok(v)
}

/// A value tagged with its quantity kind, expressed in the kind's unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub kind: QuantityKind,
    pub value: Decimal,
}

impl Quantity {
    pub fn new(kind: QuantityKind, value: Decimal) -> Self {
        Self { kind, value }
    }

    pub fn to_si(&self) -> BigRational {
        self.kind.to_si(&self.value)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind.dimension.is_dimensionless() && self.kind.unit == "1" {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{} {}", self.value, self.kind.unit)
        }
    }
}

/// Arithmetic mean computed in coherent SI and mapped back onto the scale of
/// the input kind. Point kinds yield their declared mean kind.
pub fn mean(reg: &KindRegistry, values: &[Quantity]) -> Result<Quantity, UnitError> {
    let first = values.first().ok_or(UnitError::EmptyInput)?;
    if values.iter().any(|q| q.kind != first.kind) {
        return Err(UnitError::MixedKinds);
    }
    let sum = values.iter().fold(BigRational::zero(), |acc, q| acc + q.to_si());
    let avg = sum / BigRational::from_integer(values.len().into());
    let result = if first.kind.role == Role::Point { reg.mean_of(&first.kind) } else { first.kind.clone() };
    Ok(Quantity { value: result.from_si(&avg), kind: result })
}

/// `delta / per`, kept in the composite unit of the operands so exact inputs
/// give exact outputs.
pub fn rate_of_change(reg: &KindRegistry, delta: &Quantity, per: &Quantity) -> Result<Quantity, UnitError> {
    if delta.kind.role == Role::Point {
        return Err(UnitError::Forbidden(ForbidReason::PointScaling));
    }
    if per.kind.dimension != Dimension::TIME || per.kind.role == Role::Point {
        return Err(UnitError::Forbidden(ForbidReason::NotATimeInterval));
    }
    if per.value.is_zero() {
        return Err(UnitError::ZeroTimeInterval);
    }
    let kind = composed(reg, &delta.kind, &per.kind, Operator::Div);
    let value = delta.value.checked_div(&per.value).expect("nonzero divisor");
    Ok(Quantity { kind, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> KindRegistry {
        KindRegistry::builtin()
    }

    fn kind(r: &KindRegistry, n: &str) -> QuantityKind {
        r.lookup(n).unwrap().clone()
    }

    fn verdict(r: &KindRegistry, op: Operator, a: &str, b: &str) -> Verdict {
        check_op(r, op, &kind(r, a), &kind(r, b)).unwrap()
    }

    #[test]
    fn time_plus_time_forbidden() {
        let r = reg();
        assert_eq!(verdict(&r, Operator::Add, "Time", "Time"), Verdict::Forbidden(ForbidReason::PointAddition));
    }

    #[test]
    fn time_minus_time_is_interval_with_precondition() {
        let r = reg();
        match verdict(&r, Operator::Sub, "Time", "Time") {
            Verdict::Allowed { result, precondition } => {
                assert_eq!(result.name, "TimeInterval");
                assert_eq!(precondition, Some(Precondition::RhsNotAfterLhs));
            }
            v => panic!("unexpected {v:?}"),
        }
        // temperatures may go negative
        match verdict(&r, Operator::Sub, "Temp", "Temp") {
            Verdict::Allowed { result, precondition } => {
                assert_eq!(result.name, "TempIntv");
                assert_eq!(precondition, None);
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn interval_times_real() {
        let r = reg();
        assert_eq!(verdict(&r, Operator::Mul, "TimeInterval", "Real").result().unwrap().name, "TimeInterval");
        assert_eq!(verdict(&r, Operator::Mul, "Real", "TimeInterval").result().unwrap().name, "TimeInterval");
        assert_eq!(verdict(&r, Operator::ScaleByReal, "TimeInterval", "Real").result().unwrap().name, "TimeInterval");
    }

    #[test]
    fn interval_over_interval_is_real() {
        let r = reg();
        let v = verdict(&r, Operator::Div, "TimeInterval", "TimeInterval");
        let k = v.result().unwrap();
        assert_eq!(k.name, "Real");
        assert!(k.is_real());
    }

    #[test]
    fn temp_plus_temp_forbidden() {
        let r = reg();
        assert!(verdict(&r, Operator::Add, "Temp", "Temp").is_forbidden());
        assert!(verdict(&r, Operator::Add, "TempC", "TempC").is_forbidden());
    }

    #[test]
    fn point_shift_by_interval() {
        let r = reg();
        assert_eq!(verdict(&r, Operator::Add, "Time", "TimeInterval").result().unwrap().name, "Time");
        assert_eq!(verdict(&r, Operator::Add, "TimeInterval", "Time").result().unwrap().name, "Time");
        assert_eq!(verdict(&r, Operator::Sub, "Time", "TimeInterval").result().unwrap().name, "Time");
        assert_eq!(verdict(&r, Operator::Sub, "TimeInterval", "Time"), Verdict::Forbidden(ForbidReason::IntervalMinusPoint));
        assert_eq!(verdict(&r, Operator::Add, "Time", "TempIntv"), Verdict::Forbidden(ForbidReason::DimensionMismatch));
    }

    #[test]
    fn mean_of_temps_is_mean_temp() {
        let r = reg();
        assert_eq!(verdict(&r, Operator::Mean, "Temp", "Temp").result().unwrap().name, "MeanTemp");
        assert!(verdict(&r, Operator::Mean, "Temp", "TempIntv").is_forbidden());
    }

    #[test]
    fn plain_kinds_follow_dimensions() {
        let r = reg();
        let f = verdict(&r, Operator::Div, "Force", "Area");
        assert_eq!(f.result().unwrap().name, "Pressure");
        assert_eq!(verdict(&r, Operator::Add, "Force", "Force").result().unwrap().name, "Force");
        assert!(verdict(&r, Operator::Add, "Force", "Mass").is_forbidden());
    }

    #[test]
    fn compare_needs_equal_kinds() {
        let r = reg();
        assert_eq!(verdict(&r, Operator::Compare, "Time", "Time").result().unwrap().name, "Bool");
        assert_eq!(verdict(&r, Operator::Compare, "Time", "TimeInterval"), Verdict::Forbidden(ForbidReason::KindMismatch));
    }

    #[test]
    fn unregistered_kind_is_an_error() {
        let r = reg();
        let stray = QuantityKind::new("Stray", Dimension::LENGTH, Role::Plain, "m");
        assert_eq!(
            check_op(&r, Operator::Add, &stray, &kind(&r, "Length")),
            Err(UnitError::UnregisteredKind("Stray".into()))
        );
    }

    #[test]
    fn mean_of_celsius() {
        // oracle: 10 °C = 283.15 K, 20 °C = 293.15 K, mean 288.15 K = 15 °C
        let r = reg();
        let c = kind(&r, "TempC");
        let q = |v: &str| Quantity::new(c.clone(), v.parse().unwrap());
        let m = mean(&r, &[q("10"), q("20")]).unwrap();
        assert_eq!(m.value, "15".parse().unwrap());
        assert_eq!(m.kind.name, "TempC");
        assert_eq!(m.to_si(), "288.15".parse::<Decimal>().unwrap().to_rational());
    }

    #[test]
    fn mean_edge_cases() {
        let r = reg();
        let t = kind(&r, "Temp");
        let x = Quantity::new(t.clone(), "300.5".parse().unwrap());
        let m = mean(&r, std::slice::from_ref(&x)).unwrap();
        assert_eq!(m.value, x.value);
        assert_eq!(m.kind.name, "MeanTemp");
        assert_eq!(mean(&r, &[]), Err(UnitError::EmptyInput));
        let di = Quantity::new(kind(&r, "TempIntv"), "5".parse().unwrap());
        assert_eq!(mean(&r, &[di, x]), Err(UnitError::MixedKinds));
    }

    #[test]
    fn rate_of_change_exact() {
        // oracle: 6 K over 2 h normalizes to 6 K / 7200 s = 1/1200 K/s = 3 K/h
        let mut r = reg();
        r.insert(QuantityKind::from_unit("Hours", Role::Interval, "h").unwrap());
        let delta = Quantity::new(kind(&r, "TempIntv"), "6".parse().unwrap());
        let per = Quantity::new(kind(&r, "Hours"), "2".parse().unwrap());
        let q = rate_of_change(&r, &delta, &per).unwrap();
        assert_eq!(q.value, "3".parse().unwrap());
        assert_eq!(q.to_si(), BigRational::new(1.into(), 1200.into()));
        assert_eq!(q.kind.dimension, Dimension([0, 0, -1, 0, 1, 0, 0]));
    }

    #[test]
    fn rate_of_change_edges() {
        let r = reg();
        let ti = kind(&r, "TimeInterval");
        let zero = Quantity::new(kind(&r, "TempIntv"), Decimal::zero());
        let per = Quantity::new(ti.clone(), "10".parse().unwrap());
        assert!(rate_of_change(&r, &zero, &per).unwrap().value.is_zero());
        let no_time = Quantity::new(ti, Decimal::zero());
        assert_eq!(rate_of_change(&r, &zero, &no_time), Err(UnitError::ZeroTimeInterval));
    }
}

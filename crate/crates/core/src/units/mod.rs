//! SI dimension algebra, unit expressions, affine quantity kinds and the
//! operator ledger.

pub mod calendar;
pub mod dimension;
pub mod expr;
pub mod kind;
pub mod ledger;
pub mod parse;

pub use dimension::{dim_div, dim_mul, dim_pow, Dimension};
pub use expr::{parse_expr, typecheck_expr, typecheck_str, Expr, TypeEnv};
pub use kind::{dimension_label, KindRegistry, QuantityKind, Role};
pub use ledger::{check_op, mean, rate_of_change, ForbidReason, Operator, Precondition, Quantity, Verdict};
pub use parse::{parse_unit, parse_unit_expr, UnitExpr};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UnitError {
    #[error("unknown unit symbol `{0}`")]
    UnknownUnitSymbol(String),
    #[error("unknown prefix in `{0}`")]
    UnknownPrefix(String),
    #[error("malformed unit expression `{0}`")]
    Syntax(String),
    #[error("unregistered quantity kind `{0}`")]
    UnregisteredKind(String),
    #[error("invalid quantity value `{0}`")]
    BadValue(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("mean of an empty collection")]
    EmptyInput,
    #[error("values of different kinds")]
    MixedKinds,
    #[error("rate of change over a zero time interval")]
    ZeroTimeInterval,
    #[error("forbidden: {0}")]
    Forbidden(ForbidReason),
}

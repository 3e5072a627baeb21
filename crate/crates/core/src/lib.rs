//! Domain descriptions with units of measure, compiled into communicating
//! behaviours and simulated.

pub mod analysis;
pub mod compile;
pub mod corpus;
pub mod decimal;
pub mod diag;
pub mod dsl;
pub mod model;
pub mod sim;
pub mod units;

pub use decimal::Decimal;
pub use diag::{Diagnostic, Severity, SourceSpan};
pub use model::*;
pub use analysis::{check_wellformed, classify, describe_sort, observe_attributes, observe_mereology, observe_part_sorts, observe_unique_identifier, Classification, DescriptionText};
pub use compile::{compile_model, compile_process, derive_channels, derive_signature, print_process, CompileOptions, ProcessDef, ProcessGraph};
pub use dsl::{parse_model, parse_str, print_model};
pub use sim::{check_axioms, conversion_roundtrip_check, instantiate, run, EnvironmentScript, RunConfig, Trace, TraceEvent, Verdict};
pub use units::{check_op, parse_unit, Dimension, KindRegistry, QuantityKind};

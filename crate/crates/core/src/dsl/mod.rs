//! The `.dom` surface syntax: lexer, error-recovering parser and a canonical
//! printer.

pub mod lexer;
pub mod parser;
pub mod printer;

pub use parser::{parse_model, parse_str, ParseOutput};
pub use printer::print_model;

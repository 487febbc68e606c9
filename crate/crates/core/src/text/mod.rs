//! Textual syntax for models (`.tm` files).
//!
//! ```text
//! model M {
//!   thing T;
//!   var stock = 10;
//!   machine A { stages receive, process, release; }
//!   flow T: A.receive -> A.process -> A.release;
//!   action A.process { stock = stock - token.qty; }
//! }
//! ```

mod diagnostic;
mod emit;
mod lexer;
mod parser;

pub use diagnostic::{Diagnostic, Severity};
pub use emit::emit;

use crate::model::{build_model, Model, ModelDecl};

/// Parses model text into its unresolved description.
pub fn parse_decl(text: &str) -> Result<ModelDecl, Vec<Diagnostic>> {
    parser::parse_decl(text).map_err(|d| vec![d])
}

/// Parses and builds a model. Build failures are reported as diagnostics
/// carrying the span of the offending declaration.
pub fn parse(text: &str) -> Result<Model, Vec<Diagnostic>> {
    let decl = parse_decl(text)?;
    build_model(&decl).map_err(|e| vec![Diagnostic::error(e.code(), e.to_string(), e.span())])
}

/// Whether `word` can name a machine, thing, variable or event.
pub fn is_identifier(word: &str) -> bool {
    let mut chars = word.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !parser::is_reserved(word)
}

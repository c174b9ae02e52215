//! The `.tm` text format.
//!
//! ```text
//! model "bill" {
//!   thimac Bill {
//!     action create
//!     thing BillHeight
//!   }
//!   trigger Bill.create ~> BillHeight.create
//! }
//! events {
//!   event E1 region { Bill.create }
//! }
//! behavior { E1 -> E2 }
//! scenario main { at 0 start E1 }
//! ```
//!
//! Comments run from `#` to end of line. LF and CRLF line endings are both
//! accepted. The full grammar is in `docs/grammar.md`.

mod ast;
mod lexer;
mod lower;
mod serialize;

pub use serialize::serialize_model;

use crate::bundle::ModelBundle;
use crate::diag::Diagnostic;

/// Parses a model bundle. Every failure carries at least one positioned
/// diagnostic.
pub fn parse_model(text: &str) -> Result<ModelBundle, Vec<Diagnostic>> {
    let tokens = lexer::lex(text).map_err(|d| vec![d])?;
    let file = ast::Parser::new(tokens).file().map_err(|d| vec![d])?;
    lower::lower(&file)
}

pub(crate) use serialize::quote;

//! Text format for models, rankings, contexts and queries.
//!
//! ```text
//! model ForestFire {
//!   exogenous U_L, U_MD : {0, 1};
//!   endogenous L, MD, FF : {0, 1};
//!   L := U_L;
//!   MD := U_MD;
//!   FF := L | MD;
//! }
//!
//! context Both for ForestFire { U_L=1, U_MD=1 }
//!
//! query LightningDisj {
//!   model ForestFire;
//!   context Both;
//!   cause L=1;
//!   effect FF=1;
//!   definition hp-updated, ness;
//!   expect cause;
//! }
//! ```
//!
//! Inside equation bodies a bare name is a variable if one is declared with
//! that name, otherwise a value of the range the position expects, otherwise
//! a number.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod resolve;

pub use parser::{parse_context_ref, parse_events, parse_formula, parse_source, DEFINITION_TAGS};
pub use printer::{print_context_ref, print_expr, print_formula, print_source};
pub use resolve::{Document, NamedContext, NamedRanking, Typicality};

use crate::error::Result;

/// Parses and resolves a source file.
pub fn parse(source: &str) -> Result<Document> {
    resolve::resolve(parse_source(source)?)
}

/// Canonical text for a document; parsing it yields an equal document.
pub fn print(doc: &Document) -> String {
    print_source(&doc.source)
}

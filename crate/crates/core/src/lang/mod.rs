//! Program syntax: the `.gap` surface language, sugar lowering, validation,
//! printing, and the index-based form every semantics executes.

mod ast;
pub mod compile;
mod lexer;
mod lower;
mod parser;
mod pretty;
mod surface;
mod validate;

pub use ast::*;
pub use lexer::Pos;
pub use lower::{enum_literal, lower_expr, lower_sugar, AT_START, LOC};
pub use parser::{is_keyword, parse_expr, parse_program};
pub use pretty::{print_expr, print_program};
pub use surface::*;
pub use validate::{validate, Diagnostic};

/// A lexical, syntactic or resolution error at a source position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}

/// Parses, lowers and validates `.gap` source into a core program.
pub fn load_program(src: &str) -> Result<Program, crate::Error> {
    let sp = parse_program(src)?;
    let p = lower_sugar(&sp)?;
    let diags = validate(&p);
    if diags.is_empty() {
        Ok(p)
    } else {
        Err(crate::Error::Invalid(diags))
    }
}

/// Parses a standalone expression and lowers it against `p`.
pub fn load_expr(src: &str, p: &Program) -> Result<BoolExpr, crate::Error> {
    let e = lower_expr(&parse_expr(src)?, p)?;
    let diags = validate::check_standalone(p, &e);
    if diags.is_empty() {
        Ok(e)
    } else {
        Err(crate::Error::Invalid(diags))
    }
}

//! Concrete syntax: terms, types, queries, the solver DSL and theory files.

mod lexer;
pub mod numeral;
mod parser;
mod printer;
mod solver_dsl;
pub mod theory;

use thiserror::Error;

pub use numeral::{numeral_decode, numeral_encode};
pub use parser::{parse_query, parse_term, parse_term_with, parse_type, ParseOptions, Query};
pub use parser::{CONS, LIST, NIL, NUM_TY, PAIR, SEXP_TY, SYMBOL};
pub use printer::{list_items, print_term};
pub use solver_dsl::{parse_solver, vocabulary, SolverExpr};

/// A syntax or type error at a byte offset of the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at offset {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: usize, message: impl Into<String>) -> ParseError {
        ParseError { pos, message: message.into() }
    }

    /// Same error with its position moved by `base`.
    pub fn shifted(self, base: usize) -> ParseError {
        ParseError { pos: self.pos + base, message: self.message }
    }
}

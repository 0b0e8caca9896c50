//! QIMP abstract syntax, parser and printer.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;

pub use ast::{classical_vars, quantum_vars, AExp, BExp, Com, GateRef, MeasRef, Program};
pub use parser::{lookup_gate, lookup_measurement, parse_program, BUILTIN_MEASUREMENT, KEYWORDS};
pub use pretty::{pretty, pretty_aexp, pretty_bexp, pretty_com};

use thiserror::Error;

/// Syntax or static error with a 1-based source position.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            msg: msg.into(),
        }
    }
}

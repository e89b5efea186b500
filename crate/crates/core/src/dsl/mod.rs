//! The `.aff` loop-nest language: AST, parser, printer and validator.

mod ast;
mod lexer;
mod parser;
mod print;
mod validate;

pub use ast::*;
pub use parser::parse_program;
pub use print::print_program;
pub use validate::{validate, Diagnostic};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("syntax error at {line}:{col}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("scope error at {line}:{col}: `{name}` is not bound")]
    Scope { line: usize, col: usize, name: String },
    #[error("non-affine expression at {line}:{col}: {reason}")]
    NonAffine { line: usize, col: usize, reason: String },
    #[error("invalid program: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

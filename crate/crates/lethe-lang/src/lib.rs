//! Source language for the lethe toolchain.
//!
//! The language is a first-order, lazily evaluated functional language in
//! administrative normal form: every intermediate value is bound by a `let`,
//! and every operand of an application is a variable. A program is a set of
//! function definitions plus a distinguished zero-parameter `main`.
//!
//! Concrete syntax (s-expressions, `;` starts a line comment):
//!
//! ```text
//! program ::= def+
//! def     ::= (define (name param*) expr)
//! expr    ::= (let (var app) expr)
//!           | (if var expr expr)
//!           | (return var)
//! app     ::= integer | nil
//!           | (cons var var) | (car var) | (cdr var) | (null? var)
//!           | (op var var)             ; op ∈ + - * / < =
//!           | (name var*)              ; call to a defined function
//! ```
//!
//! Booleans are integers: `0` is false, any other integer is true; the
//! comparison operators return `0`/`1`.
//!
//! The crate provides the front-end pipeline used by every downstream
//! consumer:
//!
//! 1. [`parse_program`] — text to AST, with syntactic validation (arity
//!    checks, ANF enforcement, `main` present and nullary).
//! 2. [`rename_distinct`] — alpha-renaming so every binder in the program is
//!    globally unique (required by the analysis, which keys liveness
//!    environments by bare variable name).
//! 3. [`assign_labels`] — numbers every expression node with a program point
//!    label `π` in textual order, and every if-condition and return with an
//!    evaluation point label `ψ`. Downstream components identify allocation
//!    sites, collection points, and frame sites by these labels.
//!
//! All three are pure functions; the AST is plain data and safe to share
//! across threads.

mod ast;
pub mod fixtures;
mod label;
mod parse;
mod pretty;
mod rename;

pub use ast::{App, Const, Expr, FunDef, Pi, PrimOp, Program, Psi, Span};
pub use label::assign_labels;
pub use parse::parse_program;
pub use pretty::pretty_print;
pub use rename::rename_distinct;

use thiserror::Error;

/// Errors produced by the language front end.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    /// Lexical or grammatical error at a source position.
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: u32, col: u32, msg: String },
    /// Structural error detected after parsing (arity mismatch, missing
    /// `main`, duplicate definition, unbound variable, ...).
    #[error("invalid program: {0}")]
    Invalid(String),
}

impl LangError {
    pub(crate) fn parse(span: Span, msg: impl Into<String>) -> Self {
        LangError::Parse {
            line: span.line,
            col: span.col,
            msg: msg.into(),
        }
    }
}

//! Access-path grammars and the automata pipeline that turns them into
//! executable liveness tests.
//!
//! The liveness analysis (in `lethe-analysis`) describes which parts of a
//! value a program will still inspect as a set of *access paths*: strings
//! over `0` (follow the head of a pair) and `1` (follow the tail). Those sets
//! are produced as context-free grammars over an extended alphabet:
//!
//! | symbol | meaning                                                        |
//! |--------|----------------------------------------------------------------|
//! | `0`,`1`  | select the head / tail of a pair                             |
//! | `0̄`,`1̄`  | constructor side: the path continues *into* the head / tail |
//! | `2`      | the value's weak head normal form is demanded                |
//! | `$`      | end marker (membership-form grammars only; never emitted by the analysis) |
//!
//! A garbage collector cannot interpret a context-free language, so the
//! pipeline lowers each grammar root to a deterministic finite automaton over
//! `{0,1}` in five steps, each a public function so they can be tested and
//! inspected independently:
//!
//! 1. [`mohri_nederhof`] — the standard Mohri–Nederhof regular
//!    approximation: every strongly connected component of nonterminals
//!    whose productions are not right-linear is rewritten into a
//!    right-linear component that accepts a superset of the original
//!    language.
//! 2. [`to_nfa`] — direct construction of a nondeterministic automaton from
//!    the right-linear grammar; references into other components are
//!    inlined as fresh sub-automata (the component DAG is acyclic).
//! 3. [`simplify`] — cancellation: a constructor-side symbol immediately
//!    followed (through ε-moves) by its matching selector is bypassed with
//!    an ε-edge (`0̄·0 ↦ ε`, `1̄·1 ↦ ε`); afterwards all constructor-side
//!    edges are deleted (a path that still carries an unmatched constructor
//!    symbol does not describe a dereference).
//! 4. [`resolve_two_edges`] — the demand marker `2` consumes no input: a
//!    state with a `2`-edge to a state that can still reach an accepting
//!    state becomes accepting itself, then `2`-edges are deleted.
//! 5. [`determinize`] — subset construction over `{0,1}`, Hopcroft
//!    minimization, and liveness marking ([`LivenessDfa::is_live`] is true
//!    for states that can still reach an accepting state — the test the
//!    collector actually evaluates while walking the heap).
//!
//! [`pipeline`] chains all five. The [`demand`] module provides the dynamic
//! demand algebra used by the run-time checker, and [`oracle`] provides
//! brute-force reference implementations (bounded grammar derivation,
//! path-denotation of symbolic strings, NFA simulation) against which the
//! pipeline is tested.

mod dfa;
mod grammar;
mod mn;
mod nfa;
mod pipeline;

pub mod demand;
pub mod dot;
pub mod oracle;
pub mod serialize;

pub use dfa::{Field, LivenessDfa, StateId};
pub use grammar::{Grammar, NtId, Sym};
pub use mn::{mohri_nederhof, RightLinearGrammar};
pub use nfa::{Nfa, NfaLabel};
pub use pipeline::{determinize, pipeline, resolve_two_edges, simplify, to_nfa};

use thiserror::Error;

/// Errors for grammar parsing and automata deserialization.
#[derive(Debug, Error)]
pub enum AutomataError {
    #[error("grammar text error at line {line}: {msg}")]
    GrammarText { line: usize, msg: String },
    #[error("malformed automaton data: {0}")]
    Serial(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

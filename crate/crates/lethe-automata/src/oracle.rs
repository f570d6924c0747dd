//! Brute-force reference implementations for testing the pipeline.
//!
//! Nothing here is clever, and that is the point: each function is a direct
//! transcription of a definition, slow but obviously right, against which the
//! production pipeline is checked.
//!
//! * [`bounded_strings`] enumerates terminal strings of a grammar root by
//!   breadth-first leftmost derivation, bounded in length and form count.
//! * [`forward_path`] evaluates a symbolic string to the heap access path it
//!   denotes (if any) by the rewriting semantics: `0̄·0 ↦ ε`, `1̄·1 ↦ ε`,
//!   mismatched constructor symbols denote nothing, and `2·w` denotes the
//!   empty path exactly when `w` denotes something. Evaluating right to
//!   left makes each rule local, and shows each string denotes at most one
//!   path.
//! * [`nfa_accepts`] simulates an NFA over `{0,1,ε}` directly.
//!
//! The soundness acceptance check is their composition: every forward path
//! denoted by any bounded derivation of a root must be accepted by the DFA
//! the pipeline produced for that root.

use crate::dfa::Field;
use crate::grammar::{Grammar, NtId, Sym};
use crate::nfa::{Nfa, NfaLabel};
use std::collections::{BTreeSet, HashSet, VecDeque};

/// Result of bounded enumeration.
pub struct BoundedStrings {
    /// Terminal strings of length ≤ the requested bound.
    pub strings: BTreeSet<Vec<Sym>>,
    /// Whether the enumeration explored every derivation within the bounds
    /// (false when the form cap tripped; callers that claim exhaustiveness
    /// must assert this).
    pub complete: bool,
}

/// Enumerate terminal strings derivable from `root` with at most `max_len`
/// symbols, by breadth-first leftmost expansion. Sentential forms whose
/// terminal count already exceeds `max_len` are pruned (terminals never
/// disappear); a generous slack on total form length allows nonterminals
/// that derive ε. `max_forms` caps the search as a safety valve.
pub fn bounded_strings(
    g: &Grammar,
    root: NtId,
    max_len: usize,
    max_forms: usize,
) -> BoundedStrings {
    let mut strings = BTreeSet::new();
    let mut seen: HashSet<Vec<Sym>> = HashSet::new();
    let mut queue: VecDeque<Vec<Sym>> = VecDeque::new();
    let start = vec![Sym::Nt(root)];
    seen.insert(start.clone());
    queue.push_back(start);
    let mut complete = true;

    while let Some(form) = queue.pop_front() {
        let nt_pos = form.iter().position(|s| !s.is_terminal());
        match nt_pos {
            None => {
                if form.len() <= max_len {
                    strings.insert(form);
                }
            }
            Some(i) => {
                let terminal_count = form.iter().filter(|s| s.is_terminal()).count();
                if terminal_count > max_len || form.len() > max_len + 8 {
                    continue;
                }
                let nt = match form[i] {
                    Sym::Nt(n) => n,
                    _ => unreachable!(),
                };
                for prod in g.productions(nt) {
                    let mut next = Vec::with_capacity(form.len() + prod.len());
                    next.extend_from_slice(&form[..i]);
                    next.extend_from_slice(prod);
                    next.extend_from_slice(&form[i + 1..]);
                    if seen.len() >= max_forms {
                        complete = false;
                        continue;
                    }
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    BoundedStrings { strings, complete }
}

/// The heap access path a terminal symbolic string denotes, or `None`.
///
/// Right-to-left evaluation, maintaining the path denoted by the suffix
/// consumed so far: selectors prepend their field; a constructor-side symbol
/// strips its matching field (or kills the string); a demand marker replaces
/// a denoting suffix with the empty path.
///
/// # Panics
/// On nonterminals (callers enumerate terminal strings first) and on end
/// markers (membership-form grammars are not path grammars).
pub fn forward_path(w: &[Sym]) -> Option<Vec<Field>> {
    let mut acc: Option<Vec<Field>> = Some(Vec::new());
    for &s in w.iter().rev() {
        let cur = match acc {
            None => return None,
            Some(p) => p,
        };
        acc = match s {
            Sym::T0 => {
                let mut p = cur;
                p.insert(0, Field::Car);
                Some(p)
            }
            Sym::T1 => {
                let mut p = cur;
                p.insert(0, Field::Cdr);
                Some(p)
            }
            Sym::B0 => {
                if cur.first() == Some(&Field::Car) {
                    Some(cur[1..].to_vec())
                } else {
                    None
                }
            }
            Sym::B1 => {
                if cur.first() == Some(&Field::Cdr) {
                    Some(cur[1..].to_vec())
                } else {
                    None
                }
            }
            Sym::Two => Some(Vec::new()),
            Sym::End => panic!("end marker in a path string"),
            Sym::Nt(_) => panic!("forward_path requires a terminal string"),
        };
    }
    acc
}

/// Simulate an NFA over a `{0,1}` path. Input automata may contain only
/// `T0`/`T1`/ε edges.
pub fn nfa_accepts(n: &Nfa, path: &[Field]) -> bool {
    let mut cur = n.eps_closure([n.start]);
    for &f in path {
        let label = match f {
            Field::Car => NfaLabel::T0,
            Field::Cdr => NfaLabel::T1,
        };
        let moved: Vec<_> = cur
            .iter()
            .flat_map(|&q| {
                n.edges[q as usize]
                    .iter()
                    .filter(move |(l, _)| *l == label)
                    .map(|&(_, t)| t)
            })
            .collect();
        cur = n.eps_closure(moved);
        if cur.is_empty() {
            return false;
        }
    }
    cur.iter().any(|q| n.finals.contains(q))
}

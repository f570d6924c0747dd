//! Graphviz DOT renderers for automata, used by the CLI's `--emit-dot`.
//!
//! Output is plain `digraph` text: a hidden entry arrow into the start
//! state, double circles on final states, and one edge per (label, target).
//! Dead DFA states (those from which no final state is reachable) are drawn
//! dashed so rejection sinks are visually distinct from the interesting
//! part of the automaton.

use crate::dfa::{Field, LivenessDfa};
use crate::nfa::{Nfa, NfaLabel};
use std::fmt::Write;

fn label_text(l: NfaLabel) -> &'static str {
    match l {
        NfaLabel::T0 => "0",
        NfaLabel::T1 => "1",
        NfaLabel::B0 => "0̄",
        NfaLabel::B1 => "1̄",
        NfaLabel::Two => "2",
        NfaLabel::Eps => "ε",
    }
}

/// Escape a string for use inside a double-quoted DOT attribute.
fn quote(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Render an NFA (any pipeline stage) as DOT.
pub fn nfa_dot(n: &Nfa, title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", quote(title));
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  labelloc=t; label=\"{}\";", quote(title));
    let _ = writeln!(out, "  node [shape=circle];");
    let _ = writeln!(out, "  entry [shape=point];");
    let _ = writeln!(out, "  entry -> q{};", n.start);
    for q in 0..n.n_states() as u32 {
        let shape = if n.finals.contains(&q) {
            " [shape=doublecircle]"
        } else {
            ""
        };
        let _ = writeln!(out, "  q{q}{shape};");
    }
    for (q, adj) in n.edges.iter().enumerate() {
        for &(l, t) in adj {
            let _ = writeln!(out, "  q{q} -> q{t} [label=\"{}\"];", label_text(l));
        }
    }
    out.push_str("}\n");
    out
}

/// Render a liveness DFA as DOT.
pub fn dfa_dot(d: &LivenessDfa, title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", quote(title));
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  labelloc=t; label=\"{}\";", quote(title));
    let _ = writeln!(out, "  node [shape=circle];");
    let _ = writeln!(out, "  entry [shape=point];");
    let _ = writeln!(out, "  entry -> q{};", d.start());
    for q in 0..d.n_states() as u32 {
        let mut attrs = Vec::new();
        if d.is_final(q) {
            attrs.push("shape=doublecircle".to_owned());
        }
        if !d.is_live(q) {
            attrs.push("style=dashed".to_owned());
        }
        let attr_text = if attrs.is_empty() {
            String::new()
        } else {
            format!(" [{}]", attrs.join(", "))
        };
        let _ = writeln!(out, "  q{q}{attr_text};");
    }
    for q in 0..d.n_states() as u32 {
        // Merge same-target edges into one "0,1" arrow for readability.
        let t0 = d.next(q, Field::Car);
        let t1 = d.next(q, Field::Cdr);
        if t0 == t1 {
            let _ = writeln!(out, "  q{q} -> q{t0} [label=\"0,1\"];");
        } else {
            let _ = writeln!(out, "  q{q} -> q{t0} [label=\"0\"];");
            let _ = writeln!(out, "  q{q} -> q{t1} [label=\"1\"];");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dfa_dot_is_wellformed() {
        let d = LivenessDfa::from_tables(0, vec![1, 1], vec![0, 1], vec![true, false]);
        let text = dfa_dot(&d, "1*");
        assert!(text.starts_with("digraph"));
        assert!(text.contains("q0 [shape=doublecircle]"));
        assert!(text.contains("q1 [style=dashed]"));
        assert!(text.contains("entry -> q0"));
        assert!(text.contains("q1 -> q1 [label=\"0,1\"]"));
        assert_eq!(text.matches("digraph").count(), 1);
        assert!(text.ends_with("}\n"));
    }

    #[test]
    fn nfa_dot_lists_every_edge() {
        let mut n = Nfa::new();
        let a = n.add_state();
        n.add_edge(0, NfaLabel::T0, a);
        n.add_edge(a, NfaLabel::Eps, 0);
        n.add_edge(a, NfaLabel::Two, a);
        n.finals.insert(a);
        let text = nfa_dot(&n, "demo \"quoted\"");
        assert!(text.contains("q0 -> q1 [label=\"0\"]"));
        assert!(text.contains("q1 -> q0 [label=\"ε\"]"));
        assert!(text.contains("q1 -> q1 [label=\"2\"]"));
        assert!(text.contains("q1 [shape=doublecircle]"));
        assert!(text.contains("\\\"quoted\\\""));
    }
}

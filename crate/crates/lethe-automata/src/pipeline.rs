//! The grammar-to-DFA pipeline (see crate docs for the stage overview).

use crate::dfa::{minimize, LivenessDfa};
use crate::grammar::{Grammar, NtId, Sym};
use crate::mn::{mohri_nederhof, RightLinearGrammar};
use crate::nfa::{Nfa, NfaLabel, StateId};
use std::collections::{BTreeSet, HashMap};

/// Build an NFA for the right-linear grammar's root.
///
/// Each group (see [`RightLinearGrammar::group_of`]) becomes one automaton
/// fragment: a state per member nonterminal, production chains between them,
/// and a fresh accept state for productions that end without an in-group
/// tail. References to *other* groups sit mid-production like terminals; the
/// group DAG is acyclic, so they are inlined as recursively built, freshly
/// copied sub-automata. For a rewritten group the accepting state is the
/// root's primed nonterminal instead — "the continuation pending after the
/// root has been fully used" is exactly where its language's strings end.
pub fn to_nfa(rl: &RightLinearGrammar) -> Nfa {
    let mut memo: HashMap<NtId, Nfa> = HashMap::new();
    build_template(rl, rl.root, &mut memo).trim()
}

fn terminal_label(s: Sym) -> NfaLabel {
    match s {
        Sym::T0 => NfaLabel::T0,
        Sym::T1 => NfaLabel::T1,
        Sym::B0 => NfaLabel::B0,
        Sym::B1 => NfaLabel::B1,
        Sym::Two => NfaLabel::Two,
        Sym::End => panic!("end markers do not occur in collector-facing grammars"),
        Sym::Nt(_) => unreachable!("terminal_label called on a nonterminal"),
    }
}

fn build_template(rl: &RightLinearGrammar, root: NtId, memo: &mut HashMap<NtId, Nfa>) -> Nfa {
    if let Some(t) = memo.get(&root) {
        return t.clone();
    }
    let g = &rl.grammar;
    // Members of root's group, each getting a state.
    let members: Vec<NtId> = g
        .nts()
        .filter(|&nt| rl.same_group(nt, root))
        .collect();
    let mut nfa = Nfa::new(); // state 0 = start
    let state_of: HashMap<NtId, StateId> =
        members.iter().map(|&nt| (nt, nfa.add_state())).collect();
    let accept = nfa.add_state();
    nfa.start = state_of[&root];
    // State 0 is an unused placeholder start; point start at the root's state.

    for &a in &members {
        for rhs in g.productions(a) {
            // Split off an in-group tail if present.
            let (symbols, tail) = match rhs.last() {
                Some(&Sym::Nt(m)) if rl.same_group(m, root) => (&rhs[..rhs.len() - 1], Some(m)),
                _ => (&rhs[..], None),
            };
            let mut cur = state_of[&a];
            for &s in symbols {
                match s {
                    Sym::Nt(m) => {
                        debug_assert!(
                            !rl.same_group(m, root),
                            "in-group reference not at production tail"
                        );
                        let sub = build_template(rl, m, memo);
                        let offset = nfa.splice(&sub);
                        nfa.add_edge(cur, NfaLabel::Eps, sub.start + offset);
                        let next = nfa.add_state();
                        for &f in &sub.finals {
                            nfa.add_edge(f + offset, NfaLabel::Eps, next);
                        }
                        cur = next;
                    }
                    term => {
                        let next = nfa.add_state();
                        nfa.add_edge(cur, terminal_label(term), next);
                        cur = next;
                    }
                }
            }
            match tail {
                Some(m) => {
                    nfa.add_edge(cur, NfaLabel::Eps, state_of[&m]);
                }
                None => {
                    nfa.add_edge(cur, NfaLabel::Eps, accept);
                }
            }
        }
    }

    match rl.primed.get(&root) {
        Some(p) => {
            nfa.finals.insert(state_of[p]);
        }
        None => {
            nfa.finals.insert(accept);
        }
    }
    memo.insert(root, nfa.clone());
    nfa
}

/// Cancellation: wherever a constructor-side edge is followed — through
/// ε-moves — by its matching selector, add an ε bypass (`0̄ (ε*) 0 ↦ ε`,
/// `1̄ (ε*) 1 ↦ ε`), to a fixed point; then delete all constructor-side
/// edges. A path still carrying an unmatched constructor symbol describes
/// building, not dereferencing, so it denotes no heap access.
pub fn simplify(n: &Nfa) -> Nfa {
    let mut nfa = n.clone();
    loop {
        let mut added = false;
        // Snapshot: adding ε-edges changes closures; iterate to fixpoint.
        let pairs: Vec<(StateId, NfaLabel, StateId)> = nfa
            .edges
            .iter()
            .enumerate()
            .flat_map(|(q, outs)| {
                outs.iter()
                    .filter(|(l, _)| matches!(l, NfaLabel::B0 | NfaLabel::B1))
                    .map(move |&(l, t)| (q as StateId, l, t))
            })
            .collect();
        for (q, l, t) in pairs {
            let want = if l == NfaLabel::B0 {
                NfaLabel::T0
            } else {
                NfaLabel::T1
            };
            for r in nfa.eps_closure([t]) {
                let hits: Vec<StateId> = nfa.edges[r as usize]
                    .iter()
                    .filter(|(m, _)| *m == want)
                    .map(|&(_, u)| u)
                    .collect();
                for u in hits {
                    added |= nfa.add_edge(q, NfaLabel::Eps, u);
                }
            }
        }
        if !added {
            break;
        }
    }
    for outs in &mut nfa.edges {
        outs.retain(|(l, _)| !matches!(l, NfaLabel::B0 | NfaLabel::B1));
    }
    nfa.trim()
}

/// Resolve demand markers: a `2`-edge consumes no input and asserts "the
/// value itself is needed, provided the demand continues". A state with a
/// `2`-edge to a state that can reach an accepting state therefore accepts
/// the empty remainder — mark it accepting — and the `2`-edges then
/// disappear. Reachability is computed over all edges (including other
/// `2`-edges, so chains of markers resolve in one pass).
pub fn resolve_two_edges(n: &Nfa) -> Nfa {
    let mut nfa = n.clone();
    let reach = nfa.final_reaching();
    let mut newly_final: Vec<StateId> = Vec::new();
    for (q, outs) in nfa.edges.iter().enumerate() {
        for &(l, t) in outs {
            if l == NfaLabel::Two && reach[t as usize] {
                newly_final.push(q as StateId);
            }
        }
    }
    nfa.finals.extend(newly_final);
    for outs in &mut nfa.edges {
        outs.retain(|(l, _)| *l != NfaLabel::Two);
    }
    nfa.trim()
}

/// Subset construction over `{0,1}`, then Hopcroft minimization and
/// per-state liveness marking. The input must contain only `0`/`1`/ε edges
/// (run [`simplify`] and [`resolve_two_edges`] first). The empty subset —
/// the dead state — is materialized whenever reachable, so the result's
/// transition function is total.
pub fn determinize(n: &Nfa) -> LivenessDfa {
    debug_assert!(
        n.edges
            .iter()
            .flatten()
            .all(|(l, _)| matches!(l, NfaLabel::T0 | NfaLabel::T1 | NfaLabel::Eps)),
        "determinize input must be over {{0,1,ε}}"
    );
    let mut subsets: HashMap<BTreeSet<StateId>, u32> = HashMap::new();
    let mut order: Vec<BTreeSet<StateId>> = Vec::new();
    let mut next0: Vec<u32> = Vec::new();
    let mut next1: Vec<u32> = Vec::new();
    let mut finals: Vec<bool> = Vec::new();

    let start_set = n.eps_closure([n.start]);
    subsets.insert(start_set.clone(), 0);
    order.push(start_set);
    let mut i = 0usize;
    while i < order.len() {
        let cur = order[i].clone();
        finals.push(cur.iter().any(|q| n.finals.contains(q)));
        let mut step = |label: NfaLabel| -> u32 {
            let moved: BTreeSet<StateId> = cur
                .iter()
                .flat_map(|&q| {
                    n.edges[q as usize]
                        .iter()
                        .filter(move |(l, _)| *l == label)
                        .map(|&(_, t)| t)
                })
                .collect();
            let closed = n.eps_closure(moved);
            if let Some(&id) = subsets.get(&closed) {
                return id;
            }
            let id = order.len() as u32;
            subsets.insert(closed.clone(), id);
            order.push(closed);
            id
        };
        next0.push(step(NfaLabel::T0));
        next1.push(step(NfaLabel::T1));
        i += 1;
    }

    minimize(&LivenessDfa::from_tables(0, next0, next1, finals))
}

/// The full pipeline for one grammar root.
pub fn pipeline(g: &Grammar, root: NtId) -> LivenessDfa {
    determinize(&resolve_two_edges(&simplify(&to_nfa(&mohri_nederhof(
        g, root,
    )))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfa::Field;

    fn g(text: &str) -> Grammar {
        Grammar::parse(text).unwrap()
    }

    fn run(text: &str, root: &str) -> LivenessDfa {
        let g = g(text);
        let r = g.find(root).unwrap();
        pipeline(&g, r)
    }

    /// Strings over {0,1} up to a length, lexicographic.
    fn strings(max_len: usize) -> Vec<Vec<Field>> {
        let mut out = vec![vec![]];
        let mut frontier = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for s in &frontier {
                for f in [Field::Car, Field::Cdr] {
                    let mut t = s.clone();
                    t.push(f);
                    out.push(t.clone());
                    next.push(t);
                }
            }
            frontier = next;
        }
        out
    }

    #[test]
    fn length_demand_transformer_is_one_star() {
        // D → 2 | 1 D 2 | 2 D 2 lowers to an automaton accepting exactly 1*:
        // the spine of the list is demanded, elements never are.
        let d = run("D -> 2\nD -> 1 D 2\nD -> 2 D 2\n", "D");
        for s in strings(10) {
            let expect = s.iter().all(|&f| f == Field::Cdr);
            assert_eq!(d.accepts(s.clone()), expect, "path {s:?}");
        }
    }

    #[test]
    fn whnf_only_demand_is_epsilon() {
        // σ → ε | 2 σ : accepts exactly the empty path.
        let d = run("S -> ε\nS -> 2 S\n", "S");
        assert!(d.accepts([]));
        for s in strings(4) {
            if !s.is_empty() {
                assert!(!d.accepts(s));
            }
        }
        assert!(d.equivalent(&LivenessDfa::epsilon_only()));
    }

    #[test]
    fn dead_element_root_is_empty() {
        // A value built into the head of a pair whose spine alone is
        // demanded: 2 0̄ D with D the spine automaton — the 0̄ never meets a
        // 0 selector, so no access path survives.
        let d = run("L -> 2 0̄ D\nD -> 2\nD -> 1 D 2\nD -> 2 D 2\n", "L");
        assert!(d.is_empty_language());
        for s in strings(6) {
            assert!(!d.accepts(s));
        }
    }

    #[test]
    fn cancellation_matches_selectors() {
        // 0̄ then 0 cancels: L → 0̄ 0 1 $-free chain accepts "1".
        let d = run("L -> 0̄ 0 1\n", "L");
        assert!(d.accepts([Field::Cdr]));
        assert!(!d.accepts([]));
        assert!(!d.accepts([Field::Car]));
        // Mismatched constructor: no strings at all.
        let d = run("L -> 0̄ 1 0\n", "L");
        assert!(d.is_empty_language());
    }

    #[test]
    fn two_edge_into_accepting_epsilon_accepts_empty_path() {
        // L → 2 S, S → ε: the 2-edge reaches an accepting state, so the
        // empty path is accepted; nothing else is.
        let d = run("L -> 2 S\nS -> ε\n", "L");
        assert!(d.equivalent(&LivenessDfa::epsilon_only()));
        // L → 2 S with S having no productions: demand dies, language empty.
        let mut gr = Grammar::new();
        let l = gr.nt("L");
        let s = gr.nt("S");
        gr.add(l, vec![Sym::Two, Sym::Nt(s)]);
        let d = pipeline(&gr, l);
        assert!(d.is_empty_language());
    }

    #[test]
    fn two_chains_resolve_in_one_pass() {
        // L → 2 M, M → 2 S, S → ε: chained demand markers.
        let d = run("L -> 2 M\nM -> 2 S\nS -> ε\n", "L");
        assert!(d.accepts([]));
        assert!(!d.accepts([Field::Car]));
    }

    #[test]
    fn selector_prefix_composes_with_recursion() {
        // Head of the first pair: L → 0 S, S → ε | 2 S.
        let d = run("L -> 0 S\nS -> ε\nS -> 2 S\n", "L");
        assert!(d.accepts([Field::Car]));
        assert!(!d.accepts([]));
        assert!(!d.accepts([Field::Car, Field::Car]));
    }

    #[test]
    fn mutual_recursion_overapproximates_but_stays_sound() {
        // A → 0 B 1 ; B → 2 | 1 A 0. Evaluating the symbolic strings
        // right-to-left, the exact forward language is 0(10)*: "021" ↦ 0,
        // "0102101" ↦ 010, and so on. Every exact member must survive the
        // approximation.
        let gtext = "A -> 0 B 1\nB -> 2\nB -> 1 A 0\n";
        let d = run(gtext, "A");
        assert!(d.accepts([Field::Car]));
        assert!(d.accepts([Field::Car, Field::Cdr, Field::Car]));
        assert!(d.accepts([Field::Car, Field::Cdr, Field::Car, Field::Cdr, Field::Car]));
        assert!(!d.accepts([]));
    }

    #[test]
    fn simplify_is_insensitive_to_state_numbering() {
        // Permute the states of an NFA; simplify; map back: same edge set.
        let gr = g("L -> 0̄ 2 0 1\nL -> 1̄ L 1\n");
        let root = gr.find("L").unwrap();
        let nfa = to_nfa(&mohri_nederhof(&gr, root));
        let n = nfa.n_states() as StateId;
        // A fixed pseudo-random permutation (LCG) keeps the test deterministic.
        let mut perm: Vec<StateId> = (0..n).collect();
        let mut seed = 0x5DEECE66Du64;
        for i in (1..n as usize).rev() {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (seed >> 33) as usize % (i + 1);
            perm.swap(i, j);
        }
        let mut permuted = Nfa {
            edges: vec![Default::default(); n as usize],
            start: perm[nfa.start as usize],
            finals: nfa.finals.iter().map(|&f| perm[f as usize]).collect(),
        };
        for (q, outs) in nfa.edges.iter().enumerate() {
            for &(l, t) in outs {
                permuted.edges[perm[q] as usize].insert((l, perm[t as usize]));
            }
        }
        let a = determinize(&resolve_two_edges(&simplify(&nfa)));
        let b = determinize(&resolve_two_edges(&simplify(&permuted)));
        assert!(a.equivalent(&b));
    }
}

//! Mohri–Nederhof right-linear approximation.
//!
//! A production is *right-linear with respect to a component* when members of
//! that component appear only as its final symbol. Components that violate
//! this (mutual recursion through the middle of a production — e.g. a demand
//! transformer applied under a selector prefix and followed by more symbols)
//! cannot be compiled to a finite automaton exactly, so each such component
//! is rewritten into a right-linear one accepting a superset of the original
//! language:
//!
//! For every member `A` with production `A → β₀ B₁ β₁ B₂ β₂ … B_m β_m`
//! (the `B_i` being the member occurrences):
//!
//! ```text
//! A    → β₀ B₁
//! B₁′  → β₁ B₂
//! ⋮
//! B_m′ → β_m A′
//! ```
//!
//! and `A → β A′` when the production has no member occurrences. The primed
//! nonterminal `A′` stands for "continuations pending after a use of `A`";
//! the language of a queried root `R` is read off at `R′` (its primed
//! nonterminal is the accepting state of the automaton built later). No
//! blanket `A′ → ε` is added — that would accept every pending continuation
//! at every member and discard most of the precision the analysis worked
//! for.
//!
//! Components that are already right-linear pass through untouched, so
//! grammars that were exact stay exact.

use crate::grammar::{Grammar, NtId, Sym};
use std::collections::HashMap;

/// Result of the approximation: a grammar in which every component is
/// right-linear with respect to itself (cross-component references may still
/// appear mid-production; the automaton construction inlines those).
#[derive(Debug, Clone)]
pub struct RightLinearGrammar {
    pub grammar: Grammar,
    /// The queried root in `grammar`.
    pub root: NtId,
    /// For every nonterminal whose component was rewritten, its primed
    /// continuation nonterminal.
    pub primed: HashMap<NtId, NtId>,
    /// Group id per nonterminal. A group is either an untouched right-linear
    /// component or a rewritten component together with its primed
    /// nonterminals; within a group, references occur only as production
    /// tails, and the group graph is acyclic — the two facts the automaton
    /// construction relies on.
    pub group_of: HashMap<NtId, u32>,
}

impl RightLinearGrammar {
    /// The nonterminal whose "work finished" point is the accepting state:
    /// `root′` when the root's component was rewritten, otherwise none (the
    /// root component is naturally right-linear and accepts where its
    /// productions end).
    pub fn accept_marker(&self) -> Option<NtId> {
        self.primed.get(&self.root).copied()
    }

    /// Are `a` and `b` in the same group?
    pub fn same_group(&self, a: NtId, b: NtId) -> bool {
        self.group_of.get(&a) == self.group_of.get(&b)
    }
}

/// Tarjan strongly connected components over the nonterminal reference
/// graph, restricted to nonterminals reachable from `root`. Returned in
/// reverse topological order (callees before callers); each component's
/// members are sorted.
pub(crate) fn sccs(g: &Grammar, root: NtId) -> Vec<Vec<NtId>> {
    struct T<'a> {
        g: &'a Grammar,
        index: HashMap<NtId, u32>,
        low: HashMap<NtId, u32>,
        on_stack: HashMap<NtId, bool>,
        stack: Vec<NtId>,
        next: u32,
        out: Vec<Vec<NtId>>,
    }
    impl T<'_> {
        fn strong(&mut self, v: NtId) {
            self.index.insert(v, self.next);
            self.low.insert(v, self.next);
            self.next += 1;
            self.stack.push(v);
            self.on_stack.insert(v, true);
            let succs: Vec<NtId> = self
                .g
                .productions(v)
                .iter()
                .flatten()
                .filter_map(|s| match s {
                    Sym::Nt(m) => Some(*m),
                    _ => None,
                })
                .collect();
            for w in succs {
                if !self.index.contains_key(&w) {
                    self.strong(w);
                    let lw = self.low[&w];
                    let lv = self.low.get_mut(&v).unwrap();
                    *lv = (*lv).min(lw);
                } else if self.on_stack.get(&w).copied().unwrap_or(false) {
                    let iw = self.index[&w];
                    let lv = self.low.get_mut(&v).unwrap();
                    *lv = (*lv).min(iw);
                }
            }
            if self.low[&v] == self.index[&v] {
                let mut comp = Vec::new();
                loop {
                    let w = self.stack.pop().unwrap();
                    self.on_stack.insert(w, false);
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                self.out.push(comp);
            }
        }
    }
    let mut t = T {
        g,
        index: HashMap::new(),
        low: HashMap::new(),
        on_stack: HashMap::new(),
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    t.strong(root);
    t.out
}

/// Is `nt`'s component right-linear with respect to itself? True when every
/// member occurrence in every member production is the production's final
/// symbol (and the only member occurrence).
fn component_right_linear(g: &Grammar, comp: &[NtId]) -> bool {
    let is_member = |s: &Sym| matches!(s, Sym::Nt(m) if comp.binary_search(m).is_ok());
    for &a in comp {
        for rhs in g.productions(a) {
            let members = rhs.iter().filter(|s| is_member(s)).count();
            match members {
                0 => {}
                1 if is_member(rhs.last().unwrap()) => {}
                _ => return false,
            }
        }
    }
    true
}

/// Apply the approximation (see module docs) to everything reachable from
/// `root`. Unreachable nonterminals are dropped from the result.
pub fn mohri_nederhof(g: &Grammar, root: NtId) -> RightLinearGrammar {
    let comps = sccs(g, root);
    // Copy the reachable part into a fresh grammar, creating ids first so
    // they stay in the original relative order (stable output).
    let mut out = Grammar::new();
    let mut reachable = g.reachable(root);
    reachable.sort_unstable();
    let map: HashMap<NtId, NtId> = reachable
        .iter()
        .map(|&nt| (nt, out.nt(g.name(nt))))
        .collect();
    let remap = |s: &Sym| match s {
        Sym::Nt(m) => Sym::Nt(map[m]),
        other => *other,
    };

    let mut primed: HashMap<NtId, NtId> = HashMap::new();
    let mut group_of: HashMap<NtId, u32> = HashMap::new();
    for (gi, comp) in comps.iter().enumerate() {
        let gi = gi as u32;
        if component_right_linear(g, comp) {
            for &a in comp {
                group_of.insert(map[&a], gi);
                for rhs in g.productions(a) {
                    out.add(map[&a], rhs.iter().map(remap).collect());
                }
            }
            continue;
        }
        // Rewrite this component. Create primed nonterminals for every member
        // (dodging any source name that already ends in a prime).
        for &a in comp {
            let mut pname = format!("{}'", g.name(a));
            while out.find(&pname).is_some() {
                pname.push('\'');
            }
            let pa = out.nt(&pname);
            primed.insert(map[&a], pa);
            group_of.insert(map[&a], gi);
            group_of.insert(pa, gi);
        }
        let is_member = |s: &Sym| matches!(s, Sym::Nt(m) if comp.binary_search(m).is_ok());
        for &a in comp {
            let a_new = map[&a];
            let a_primed = primed[&a_new];
            for rhs in g.productions(a) {
                // Split the production at member occurrences.
                let mut segments: Vec<Vec<Sym>> = vec![Vec::new()];
                let mut members: Vec<NtId> = Vec::new();
                for s in rhs {
                    if is_member(s) {
                        if let Sym::Nt(m) = s {
                            members.push(map[m]);
                        }
                        segments.push(Vec::new());
                    } else {
                        segments.last_mut().unwrap().push(remap(s));
                    }
                }
                if members.is_empty() {
                    // A → β A′
                    let mut p = segments.pop().unwrap();
                    p.push(Sym::Nt(a_primed));
                    out.add(a_new, p);
                } else {
                    // A → β₀ B₁ ; B_i′ → β_i B_{i+1} ; B_m′ → β_m A′
                    let mut first = segments[0].clone();
                    first.push(Sym::Nt(members[0]));
                    out.add(a_new, first);
                    for i in 0..members.len() {
                        let lhs = primed[&members[i]];
                        let mut p = segments[i + 1].clone();
                        let cont = if i + 1 < members.len() {
                            Sym::Nt(members[i + 1])
                        } else {
                            Sym::Nt(a_primed)
                        };
                        p.push(cont);
                        out.add(lhs, p);
                    }
                }
            }
        }
    }

    RightLinearGrammar {
        grammar: out,
        root: map[&root],
        primed,
        group_of,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The self-applied demand transformer of the list-length function:
    /// D → 2 | 1 D 2 | 2 D 2 — not right-linear (the recursive reference is
    /// followed by `2`).
    fn length_demand_grammar() -> (Grammar, NtId) {
        let mut g = Grammar::new();
        let d = g.nt("D");
        g.add(d, vec![Sym::Two]);
        g.add(d, vec![Sym::T1, Sym::Nt(d), Sym::Two]);
        g.add(d, vec![Sym::Two, Sym::Nt(d), Sym::Two]);
        (g, d)
    }

    #[test]
    fn rewrites_the_length_demand_component() {
        let (g, d) = length_demand_grammar();
        let rl = mohri_nederhof(&g, d);
        let out = &rl.grammar;
        let d2 = out.find("D").unwrap();
        let dp = out.find("D'").unwrap();
        assert_eq!(rl.accept_marker(), Some(dp));
        let prods = |nt| {
            let mut v: Vec<Vec<Sym>> = out.productions(nt).to_vec();
            v.sort();
            v
        };
        let mut expect_d = vec![
            vec![Sym::Two, Sym::Nt(dp)],
            vec![Sym::T1, Sym::Nt(d2)],
            vec![Sym::Two, Sym::Nt(d2)],
        ];
        expect_d.sort();
        assert_eq!(prods(d2), expect_d);
        assert_eq!(prods(dp), vec![vec![Sym::Two, Sym::Nt(dp)]]);
    }

    #[test]
    fn right_linear_components_pass_through() {
        let mut g = Grammar::new();
        let s = g.nt("S");
        g.add(s, vec![]);
        g.add(s, vec![Sym::Two, Sym::Nt(s)]);
        let rl = mohri_nederhof(&g, s);
        assert!(rl.primed.is_empty());
        assert_eq!(rl.accept_marker(), None);
        let s2 = rl.grammar.find("S").unwrap();
        assert_eq!(
            rl.grammar.productions(s2),
            &[vec![], vec![Sym::Two, Sym::Nt(s2)]]
        );
    }

    #[test]
    fn cross_component_references_stay_in_place() {
        // R → 0 D 1 with D in a lower (right-linear) component: R's component
        // is the trivial {R}, right-linear (no self references), so nothing
        // is rewritten even though D sits mid-production.
        let mut g = Grammar::new();
        let r = g.nt("R");
        let d = g.nt("D");
        g.add(d, vec![Sym::Two]);
        g.add(r, vec![Sym::T0, Sym::Nt(d), Sym::T1]);
        let rl = mohri_nederhof(&g, r);
        assert!(rl.primed.is_empty());
        let r2 = rl.grammar.find("R").unwrap();
        let d2 = rl.grammar.find("D").unwrap();
        assert_eq!(
            rl.grammar.productions(r2),
            &[vec![Sym::T0, Sym::Nt(d2), Sym::T1]]
        );
    }

    #[test]
    fn mutual_recursion_is_rewritten_together() {
        // A → 0 B 1 ; B → 2 | 1 A 0 — one component {A, B}, not right-linear.
        let mut g = Grammar::new();
        let a = g.nt("A");
        let b = g.nt("B");
        g.add(a, vec![Sym::T0, Sym::Nt(b), Sym::T1]);
        g.add(b, vec![Sym::Two]);
        g.add(b, vec![Sym::T1, Sym::Nt(a), Sym::T0]);
        let rl = mohri_nederhof(&g, a);
        let out = &rl.grammar;
        let (a2, b2) = (out.find("A").unwrap(), out.find("B").unwrap());
        let (ap, bp) = (out.find("A'").unwrap(), out.find("B'").unwrap());
        assert_eq!(rl.accept_marker(), Some(ap));
        let sorted = |nt| {
            let mut v: Vec<Vec<Sym>> = out.productions(nt).to_vec();
            v.sort();
            v
        };
        // A → 0 B ; B′ → 1 A′          (from A → 0 B 1)
        assert_eq!(sorted(a2), vec![vec![Sym::T0, Sym::Nt(b2)]]);
        // B → 2 B′ (from B → 2) and B → 1 A ; A′ → 0 B′ (from B → 1 A 0)
        let mut eb = vec![vec![Sym::Two, Sym::Nt(bp)], vec![Sym::T1, Sym::Nt(a2)]];
        eb.sort();
        assert_eq!(sorted(b2), eb);
        assert_eq!(sorted(ap), vec![vec![Sym::T0, Sym::Nt(bp)]]);
        assert_eq!(sorted(bp), vec![vec![Sym::T1, Sym::Nt(ap)]]);
    }

    #[test]
    fn unreachable_nonterminals_are_dropped() {
        let (mut g, d) = length_demand_grammar();
        let junk = g.nt("Junk");
        g.add(junk, vec![Sym::T0]);
        let rl = mohri_nederhof(&g, d);
        assert!(rl.grammar.find("Junk").is_none());
    }
}

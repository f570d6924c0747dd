//! Nondeterministic finite automata over the access-path alphabet.
//!
//! States are dense `u32` ids; edges live in per-state adjacency lists. The
//! pipeline stages each take an NFA and return a rewritten one, so the type
//! is a plain value with no interior bookkeeping.

use std::collections::BTreeSet;

pub type StateId = u32;

/// Edge labels. Constructor-side and demand-marker edges exist only between
/// construction and their resolution stages; the determinizer accepts only
/// `T0`/`T1`/`Eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NfaLabel {
    T0,
    T1,
    B0,
    B1,
    Two,
    Eps,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Nfa {
    /// Adjacency: `edges[q]` lists `(label, target)` pairs, kept sorted and
    /// deduplicated so automata compare structurally.
    pub edges: Vec<BTreeSet<(NfaLabel, StateId)>>,
    pub start: StateId,
    pub finals: BTreeSet<StateId>,
}

impl Nfa {
    pub fn new() -> Self {
        Nfa {
            edges: vec![BTreeSet::new()],
            start: 0,
            finals: BTreeSet::new(),
        }
    }

    pub fn n_states(&self) -> usize {
        self.edges.len()
    }

    pub fn add_state(&mut self) -> StateId {
        self.edges.push(BTreeSet::new());
        (self.edges.len() - 1) as StateId
    }

    pub fn add_edge(&mut self, from: StateId, label: NfaLabel, to: StateId) -> bool {
        self.edges[from as usize].insert((label, to))
    }

    /// ε-closure of a set of states.
    pub fn eps_closure(&self, seed: impl IntoIterator<Item = StateId>) -> BTreeSet<StateId> {
        let mut out: BTreeSet<StateId> = BTreeSet::new();
        let mut stack: Vec<StateId> = seed.into_iter().collect();
        for &s in &stack {
            out.insert(s);
        }
        while let Some(q) = stack.pop() {
            for &(l, t) in &self.edges[q as usize] {
                if l == NfaLabel::Eps && out.insert(t) {
                    stack.push(t);
                }
            }
        }
        out
    }

    /// States that can reach an accepting state over any edges.
    pub fn final_reaching(&self) -> Vec<bool> {
        let n = self.n_states();
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (q, outs) in self.edges.iter().enumerate() {
            for &(_, t) in outs {
                rev[t as usize].push(q as StateId);
            }
        }
        let mut reach = vec![false; n];
        let mut stack: Vec<StateId> = self.finals.iter().copied().collect();
        for &f in &self.finals {
            reach[f as usize] = true;
        }
        while let Some(q) = stack.pop() {
            for &p in &rev[q as usize] {
                if !reach[p as usize] {
                    reach[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        reach
    }

    /// States reachable from the start over any edges.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.n_states()];
        let mut stack = vec![self.start];
        seen[self.start as usize] = true;
        while let Some(q) = stack.pop() {
            for &(_, t) in &self.edges[q as usize] {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// Copy `other` into `self`, returning the state-id offset. Edges,
    /// starts, and finals of `other` keep their relative structure.
    pub fn splice(&mut self, other: &Nfa) -> StateId {
        let offset = self.n_states() as StateId;
        for outs in &other.edges {
            self.edges
                .push(outs.iter().map(|&(l, t)| (l, t + offset)).collect());
        }
        offset
    }

    /// Drop states unreachable from the start, compacting ids. Keeps the
    /// start state even if it has no edges.
    pub fn trim(&self) -> Nfa {
        let seen = self.reachable();
        let mut map = vec![u32::MAX; self.n_states()];
        let mut next = 0u32;
        for (i, &s) in seen.iter().enumerate() {
            if s {
                map[i] = next;
                next += 1;
            }
        }
        let mut out = Nfa {
            edges: vec![BTreeSet::new(); next as usize],
            start: map[self.start as usize],
            finals: BTreeSet::new(),
        };
        for (q, outs) in self.edges.iter().enumerate() {
            if !seen[q] {
                continue;
            }
            for &(l, t) in outs {
                if seen[t as usize] {
                    out.edges[map[q] as usize].insert((l, map[t as usize]));
                }
            }
        }
        for &f in &self.finals {
            if seen[f as usize] {
                out.finals.insert(map[f as usize]);
            }
        }
        out
    }
}

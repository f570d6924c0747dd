//! Deterministic liveness automata.
//!
//! The end product of the pipeline: a total DFA over `{0,1}` (pair head /
//! pair tail) whose accepting states mark access paths the program may still
//! take, plus a precomputed per-state *liveness* bit — whether any accepting
//! state is still reachable. The collector walks heap edges driving one of
//! these automata and prunes wherever `is_live` goes false; the dynamic
//! checker additionally uses acceptance itself (`is_final`) to decide whether
//! the value a path lands on is witnessed.

use crate::nfa::{Nfa, NfaLabel};
use std::collections::{BTreeSet, HashMap};

pub type StateId = u32;

/// A heap edge: which field of a pair is followed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    /// Head of a pair (path symbol `0`).
    Car,
    /// Tail of a pair (path symbol `1`).
    Cdr,
}

impl Field {
    pub fn index(self) -> usize {
        match self {
            Field::Car => 0,
            Field::Cdr => 1,
        }
    }
}

/// Total, minimized DFA over `{0,1}` with per-state liveness.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LivenessDfa {
    start: StateId,
    next0: Vec<StateId>,
    next1: Vec<StateId>,
    finals: Vec<bool>,
    live: Vec<bool>,
}

impl LivenessDfa {
    /// Construct from raw tables. `live` is recomputed, not trusted.
    pub(crate) fn from_tables(
        start: StateId,
        next0: Vec<StateId>,
        next1: Vec<StateId>,
        finals: Vec<bool>,
    ) -> Self {
        let mut d = LivenessDfa {
            start,
            next0,
            next1,
            finals,
            live: Vec::new(),
        };
        d.live = d.compute_live();
        d
    }

    fn compute_live(&self) -> Vec<bool> {
        let n = self.finals.len();
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for q in 0..n {
            rev[self.next0[q] as usize].push(q as StateId);
            rev[self.next1[q] as usize].push(q as StateId);
        }
        let mut live = self.finals.clone();
        let mut stack: Vec<StateId> = (0..n as StateId).filter(|&q| live[q as usize]).collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q as usize] {
                if !live[p as usize] {
                    live[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        live
    }

    /// The automaton accepting every path (every state accepting).
    pub fn all_paths() -> Self {
        LivenessDfa::from_tables(0, vec![0], vec![0], vec![true])
    }

    /// The automaton accepting exactly the empty path.
    pub fn epsilon_only() -> Self {
        LivenessDfa::from_tables(0, vec![1, 1], vec![1, 1], vec![true, false])
    }

    /// The automaton accepting nothing.
    pub fn empty() -> Self {
        LivenessDfa::from_tables(0, vec![0], vec![0], vec![false])
    }

    pub fn n_states(&self) -> usize {
        self.finals.len()
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    /// Total transition function.
    pub fn next(&self, q: StateId, f: Field) -> StateId {
        match f {
            Field::Car => self.next0[q as usize],
            Field::Cdr => self.next1[q as usize],
        }
    }

    /// Does `q` accept (the empty path from `q` is a demanded access)?
    pub fn is_final(&self, q: StateId) -> bool {
        self.finals[q as usize]
    }

    /// Can `q` still reach an accepting state? The collector prunes walks
    /// the moment this goes false.
    pub fn is_live(&self, q: StateId) -> bool {
        self.live[q as usize]
    }

    /// The language is empty iff the start state is already dead.
    pub fn is_empty_language(&self) -> bool {
        !self.is_live(self.start)
    }

    /// The non-live sink, if one is reachable.
    pub fn dead_state(&self) -> Option<StateId> {
        (0..self.n_states() as StateId).find(|&q| !self.live[q as usize])
    }

    pub fn accepts(&self, path: impl IntoIterator<Item = Field>) -> bool {
        let mut q = self.start;
        for f in path {
            q = self.next(q, f);
        }
        self.is_final(q)
    }

    /// Canonical renumbering: breadth-first from the start over (0, 1).
    /// Isomorphic automata — and, for minimized automata, exactly the
    /// language-equal ones — produce identical canonical forms, which makes
    /// these bytes usable as a structural hash key.
    pub fn canonical(&self) -> LivenessDfa {
        let n = self.n_states();
        let mut map = vec![u32::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = std::collections::VecDeque::new();
        map[self.start as usize] = 0;
        order.push(self.start);
        queue.push_back(self.start);
        while let Some(q) = queue.pop_front() {
            for f in [Field::Car, Field::Cdr] {
                let t = self.next(q, f);
                if map[t as usize] == u32::MAX {
                    map[t as usize] = order.len() as u32;
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        // Unreachable states are dropped.
        let m = order.len();
        let mut next0 = vec![0; m];
        let mut next1 = vec![0; m];
        let mut finals = vec![false; m];
        for (new_q, &old_q) in order.iter().enumerate() {
            next0[new_q] = map[self.next0[old_q as usize] as usize];
            next1[new_q] = map[self.next1[old_q as usize] as usize];
            finals[new_q] = self.finals[old_q as usize];
        }
        LivenessDfa::from_tables(0, next0, next1, finals)
    }

    /// Stable byte encoding of the canonical form.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let c = self.canonical();
        let mut out = Vec::with_capacity(8 + c.n_states() * 9);
        out.extend_from_slice(&(c.n_states() as u32).to_le_bytes());
        out.extend_from_slice(&c.start.to_le_bytes());
        for q in 0..c.n_states() {
            out.extend_from_slice(&c.next0[q].to_le_bytes());
            out.extend_from_slice(&c.next1[q].to_le_bytes());
            out.push(c.finals[q] as u8);
        }
        out
    }

    /// Exact language equality (via canonical minimized forms).
    pub fn equivalent(&self, other: &LivenessDfa) -> bool {
        minimize(self).canonical_bytes() == minimize(other).canonical_bytes()
    }

    /// Convert to an NFA (for union/composition constructions).
    pub fn to_nfa(&self) -> Nfa {
        let mut n = Nfa::new();
        // State 0 of the NFA is its start; add ours after it.
        let offset = 1;
        for _ in 0..self.n_states() {
            n.add_state();
        }
        n.add_edge(0, NfaLabel::Eps, self.start + offset);
        for q in 0..self.n_states() as StateId {
            // Skip edges into dead states: they contribute nothing and keep
            // the NFA small.
            for (f, label) in [(Field::Car, NfaLabel::T0), (Field::Cdr, NfaLabel::T1)] {
                let t = self.next(q, f);
                if self.is_live(t) {
                    n.add_edge(q + offset, label, t + offset);
                }
            }
            if self.is_final(q) {
                n.finals.insert(q + offset);
            }
        }
        n
    }
}

/// Hopcroft partition refinement. Input tables must be total; unreachable
/// states are dropped first. Returns a minimal automaton for the same
/// language.
pub fn minimize(d: &LivenessDfa) -> LivenessDfa {
    // Restrict to reachable states.
    let c = d.canonical();
    let n = c.n_states();
    if n == 0 {
        return c;
    }

    // Partition states, refining by (finality, successor blocks) to a fixed
    // point. Hopcroft's worklist formulation over the 2-symbol alphabet.
    let mut block_of: Vec<u32> = c.finals.iter().map(|&f| if f { 1 } else { 0 }).collect();
    // Degenerate single-class cases.
    let classes: BTreeSet<u32> = block_of.iter().copied().collect();
    let mut n_blocks = classes.len() as u32;
    if n_blocks == 1 {
        block_of.iter_mut().for_each(|b| *b = 0);
        n_blocks = 1;
    } else {
        // Normalize ids to 0..n_blocks.
        let remap: HashMap<u32, u32> = classes.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect();
        for b in &mut block_of {
            *b = remap[b];
        }
    }

    loop {
        // Signature of a state: (its block, block of next0, block of next1).
        let mut sig_map: HashMap<(u32, u32, u32), u32> = HashMap::new();
        let mut new_block_of = vec![0u32; n];
        let mut next_id = 0u32;
        for q in 0..n {
            let sig = (
                block_of[q],
                block_of[c.next0[q] as usize],
                block_of[c.next1[q] as usize],
            );
            let id = *sig_map.entry(sig).or_insert_with(|| {
                let id = next_id;
                next_id += 1;
                id
            });
            new_block_of[q] = id;
        }
        if next_id == n_blocks {
            block_of = new_block_of;
            break;
        }
        n_blocks = next_id;
        block_of = new_block_of;
    }

    let m = n_blocks as usize;
    let mut next0 = vec![0u32; m];
    let mut next1 = vec![0u32; m];
    let mut finals = vec![false; m];
    for q in 0..n {
        let b = block_of[q] as usize;
        next0[b] = block_of[c.next0[q] as usize];
        next1[b] = block_of[c.next1[q] as usize];
        finals[b] = c.finals[q];
    }
    LivenessDfa::from_tables(block_of[c.start as usize], next0, next1, finals).canonical()
}

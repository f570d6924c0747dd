//! Context-free grammars over the access-path alphabet.
//!
//! Nonterminals are interned to dense ids; the emitted text form (one
//! production per line, `NT -> sym sym …`) is stable across runs so analysis
//! output can be diffed and cached.

use crate::AutomataError;
use std::collections::HashMap;

/// Dense nonterminal id, valid for the grammar that created it.
pub type NtId = u32;

/// A grammar symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    /// `0` — select the head of a pair.
    T0,
    /// `1` — select the tail of a pair.
    T1,
    /// `0̄` — constructor side: the path continues into the head.
    B0,
    /// `1̄` — constructor side: the path continues into the tail.
    B1,
    /// `2` — the value's weak head normal form is demanded.
    Two,
    /// `$` — end marker. Used only when a grammar is written in membership
    /// form for exploratory queries; the analysis never emits it and the
    /// collector-facing pipeline never sees it.
    End,
    /// Reference to a nonterminal.
    Nt(NtId),
}

impl Sym {
    pub fn is_terminal(self) -> bool {
        !matches!(self, Sym::Nt(_))
    }
}

/// Collapse adjacent `2 2` into `2`. The demand marker is idempotent — a
/// doubly demanded weak head normal form is just a demanded one — and the
/// analysis applies this normalization to every string it constructs so that
/// emitted grammars stay in the customary compact form.
pub fn normalize_twos(syms: &mut Vec<Sym>) {
    syms.dedup_by(|b, a| *a == Sym::Two && *b == Sym::Two);
}

/// A context-free grammar with interned nonterminal names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Grammar {
    names: Vec<String>,
    index: HashMap<String, NtId>,
    /// Productions per nonterminal, in insertion order, deduplicated.
    prods: Vec<Vec<Vec<Sym>>>,
}

impl Grammar {
    pub fn new() -> Self {
        Self::default()
    }

    /// Intern a nonterminal by name, creating it with no productions if new.
    pub fn nt(&mut self, name: &str) -> NtId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as NtId;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.prods.push(Vec::new());
        id
    }

    /// Look up an existing nonterminal.
    pub fn find(&self, name: &str) -> Option<NtId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: NtId) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Add a production; duplicates of an existing right-hand side are
    /// ignored so callers can emit unions naively.
    pub fn add(&mut self, lhs: NtId, mut rhs: Vec<Sym>) {
        normalize_twos(&mut rhs);
        let list = &mut self.prods[lhs as usize];
        if !list.contains(&rhs) {
            list.push(rhs);
        }
    }

    pub fn productions(&self, id: NtId) -> &[Vec<Sym>] {
        &self.prods[id as usize]
    }

    pub fn nts(&self) -> impl Iterator<Item = NtId> + '_ {
        (0..self.names.len() as NtId).into_iter()
    }

    /// Total number of productions.
    pub fn production_count(&self) -> usize {
        self.prods.iter().map(|p| p.len()).sum()
    }

    /// Nonterminals reachable from `root` through production references.
    pub fn reachable(&self, root: NtId) -> Vec<NtId> {
        let mut seen = vec![false; self.names.len()];
        let mut stack = vec![root];
        let mut out = Vec::new();
        seen[root as usize] = true;
        while let Some(nt) = stack.pop() {
            out.push(nt);
            for rhs in self.productions(nt) {
                for &s in rhs {
                    if let Sym::Nt(m) = s {
                        if !seen[m as usize] {
                            seen[m as usize] = true;
                            stack.push(m);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Render one symbol.
    pub fn sym_text(&self, s: Sym) -> String {
        match s {
            Sym::T0 => "0".into(),
            Sym::T1 => "1".into(),
            Sym::B0 => "0̄".into(),
            Sym::B1 => "1̄".into(),
            Sym::Two => "2".into(),
            Sym::End => "$".into(),
            Sym::Nt(id) => self.name(id).to_string(),
        }
    }

    /// Stable text form: one production per line, `NT -> sym sym …`, empty
    /// right-hand sides rendered as `ε`. Nonterminals appear in id
    /// (creation) order, which the analysis makes deterministic.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for nt in self.nts() {
            for rhs in self.productions(nt) {
                out.push_str(self.name(nt));
                out.push_str(" ->");
                if rhs.is_empty() {
                    out.push_str(" ε");
                } else {
                    for &s in rhs {
                        out.push(' ');
                        out.push_str(&self.sym_text(s));
                    }
                }
                out.push('\n');
            }
        }
        out
    }

    /// Parse the text form produced by [`Grammar::to_text`]. Lines starting
    /// with `#` and blank lines are ignored. Any whitespace-free token other
    /// than the terminal symbols is a nonterminal name.
    pub fn parse(text: &str) -> Result<Grammar, AutomataError> {
        let mut g = Grammar::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let lhs = parts.next().ok_or_else(|| AutomataError::GrammarText {
                line: i + 1,
                msg: "missing left-hand side".into(),
            })?;
            match parts.next() {
                Some("->") => {}
                other => {
                    return Err(AutomataError::GrammarText {
                        line: i + 1,
                        msg: format!("expected `->`, got {other:?}"),
                    })
                }
            }
            let lhs = g.nt(lhs);
            let mut rhs = Vec::new();
            for tok in parts {
                let sym = match tok {
                    "0" => Sym::T0,
                    "1" => Sym::T1,
                    "0̄" => Sym::B0,
                    "1̄" => Sym::B1,
                    "2" => Sym::Two,
                    "$" => Sym::End,
                    "ε" => continue,
                    name => Sym::Nt(g.nt(name)),
                };
                rhs.push(sym);
            }
            g.add(lhs, rhs);
        }
        Ok(g)
    }
}

//! Compiling the liveness grammar into the automata and tables the runtime
//! consumes.
//!
//! Every root nonterminal goes through the full approximation pipeline
//! (Mohri–Nederhof, NFA construction, constructor cancellation, demand-marker
//! resolution, determinization); structurally identical DFAs are shared so a
//! program's many dead-variable roots all point at the one empty automaton.
//! The table layer then rekeys everything by what the collector actually has
//! in hand at a safe point: a function name at entry, an `(ψ, branch)` pair
//! after a conditional, a frame's saved control, a closure's allocation site.

use crate::emit::{build_grammar, Analysis, Roots};
use crate::walk::Branch;
use lethe_automata::{pipeline, LivenessDfa};
use lethe_lang::{Pi, Program, Psi};
use std::collections::{BTreeMap, HashMap};

/// Index into [`CompiledAnalysis::automata`].
pub type DfaIdx = usize;

/// Demands on the copies a closure captured, by variable. Closures allocated
/// by constant lets capture nothing and get an empty map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Descriptor {
    /// Allocation site this descriptor describes.
    pub pi: Pi,
    pub vars: BTreeMap<String, DfaIdx>,
}

/// Everything the collector and the soundness oracle need, keyed the way the
/// runtime asks for it.
#[derive(Debug, Clone)]
pub struct GcTables {
    /// The all-paths automaton (print stack, update cells).
    pub s_all: DfaIdx,
    /// Function → parameter → automaton for the entry collection point.
    pub entry: BTreeMap<String, BTreeMap<String, DfaIdx>>,
    /// `(ψ, branch)` → in-scope variable → automaton for the collection
    /// point after the branch commits.
    pub after_if: BTreeMap<(Psi, Branch), BTreeMap<String, DfaIdx>>,
    /// Saved-control tables for suspended frames.
    pub let_site: BTreeMap<Pi, BTreeMap<String, DfaIdx>>,
    pub if_site: BTreeMap<Psi, BTreeMap<String, DfaIdx>>,
    pub return_site: BTreeMap<Psi, (String, DfaIdx)>,
    /// All closure descriptors; ids index this vector.
    pub descriptors: Vec<Descriptor>,
    /// Allocation site → descriptor installed at creation.
    pub default_descriptor: BTreeMap<Pi, usize>,
    /// `(ψ, branch)` → (allocation site, narrowed descriptor) pairs to apply
    /// to this activation's closures when the branch commits.
    pub refine: BTreeMap<(Psi, Branch), Vec<(Pi, usize)>>,
}

/// Sizes reported by the bench harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisStats {
    /// Nonterminals in the liveness grammar.
    pub nonterminals: usize,
    /// Productions in the liveness grammar.
    pub productions: usize,
    /// Distinct automata after structural sharing.
    pub automata: usize,
    /// Total states across those automata.
    pub dfa_states: usize,
}

/// A fully compiled analysis: grammar, roots, automata, and runtime tables.
#[derive(Debug, Clone)]
pub struct CompiledAnalysis {
    pub grammar: lethe_automata::Grammar,
    pub roots: Roots,
    pub automata: Vec<LivenessDfa>,
    /// Root nonterminal name → automaton, for every named root.
    pub dfa_of: BTreeMap<String, DfaIdx>,
    pub tables: GcTables,
    pub stats: AnalysisStats,
}

impl CompiledAnalysis {
    pub fn automaton(&self, idx: DfaIdx) -> &LivenessDfa {
        &self.automata[idx]
    }

    /// Automaton for a named root.
    pub fn automaton_named(&self, name: &str) -> Option<&LivenessDfa> {
        self.dfa_of.get(name).map(|&i| &self.automata[i])
    }
}

fn all_root_names(roots: &Roots) -> Vec<String> {
    let mut names = vec![roots.s_all.clone()];
    names.extend(roots.demand.values().cloned());
    names.extend(roots.summary.values().cloned());
    for table in roots.entry.values() {
        names.extend(table.values().cloned());
    }
    for table in roots.after_if.values() {
        names.extend(table.values().cloned());
    }
    for table in roots.let_site.values() {
        names.extend(table.values().cloned());
    }
    for table in roots.if_site.values() {
        names.extend(table.values().cloned());
    }
    names.extend(roots.return_site.values().map(|(_, n)| n.clone()));
    for table in roots.closure_default.values() {
        names.extend(table.values().cloned());
    }
    for table in roots.closure_variant.values() {
        names.extend(table.values().cloned());
    }
    names.sort();
    names.dedup();
    names
}

/// Compile a validated, renamed, labeled program: build the grammar, run the
/// pipeline on every root, share identical automata, and assemble the
/// runtime tables.
pub fn compile(p: &Program) -> CompiledAnalysis {
    let Analysis { grammar, roots } = build_grammar(p);

    let mut automata: Vec<LivenessDfa> = Vec::new();
    let mut by_shape: HashMap<Vec<u8>, DfaIdx> = HashMap::new();
    let mut dfa_of: BTreeMap<String, DfaIdx> = BTreeMap::new();
    for name in all_root_names(&roots) {
        let nt = grammar
            .find(&name)
            .unwrap_or_else(|| panic!("root {name} missing from grammar"));
        let dfa = pipeline(&grammar, nt);
        let idx = *by_shape.entry(dfa.canonical_bytes()).or_insert_with(|| {
            automata.push(dfa);
            automata.len() - 1
        });
        dfa_of.insert(name, idx);
    }

    let lookup =
        |table: &BTreeMap<String, String>| -> BTreeMap<String, DfaIdx> {
            table
                .iter()
                .map(|(var, name)| (var.clone(), dfa_of[name]))
                .collect()
        };

    let mut tables = GcTables {
        s_all: dfa_of[&roots.s_all],
        entry: roots
            .entry
            .iter()
            .map(|(f, t)| (f.clone(), lookup(t)))
            .collect(),
        after_if: roots
            .after_if
            .iter()
            .map(|(k, t)| (*k, lookup(t)))
            .collect(),
        let_site: roots
            .let_site
            .iter()
            .map(|(k, t)| (*k, lookup(t)))
            .collect(),
        if_site: roots
            .if_site
            .iter()
            .map(|(k, t)| (*k, lookup(t)))
            .collect(),
        return_site: roots
            .return_site
            .iter()
            .map(|(psi, (var, name))| (*psi, (var.clone(), dfa_of[name])))
            .collect(),
        descriptors: Vec::new(),
        default_descriptor: BTreeMap::new(),
        refine: BTreeMap::new(),
    };

    // Descriptors: defaults first (one per allocation site), then one per
    // (site, ψ, branch) refinement.
    for (pi, table) in &roots.closure_default {
        tables.descriptors.push(Descriptor {
            pi: *pi,
            vars: lookup(table),
        });
        tables
            .default_descriptor
            .insert(*pi, tables.descriptors.len() - 1);
    }
    for ((psi, branch), pis) in &roots.refinable {
        let mut applied = Vec::new();
        for pi in pis {
            let table = &roots.closure_variant[&(*pi, *psi, *branch)];
            tables.descriptors.push(Descriptor {
                pi: *pi,
                vars: lookup(table),
            });
            applied.push((*pi, tables.descriptors.len() - 1));
        }
        tables.refine.insert((*psi, *branch), applied);
    }

    let stats = AnalysisStats {
        nonterminals: grammar.len(),
        productions: grammar.production_count(),
        automata: automata.len(),
        dfa_states: automata.iter().map(|d| d.n_states()).sum(),
    };

    CompiledAnalysis {
        grammar,
        roots,
        automata,
        dfa_of,
        tables,
        stats,
    }
}

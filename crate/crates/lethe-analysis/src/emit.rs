//! Assembling the program-wide liveness grammar and its named roots.
//!
//! One walk per function (plus one restricted walk per if-branch for the
//! refinement variants) yields demand sets; this module interns them as
//! productions of a single [`Grammar`] and records which nonterminal answers
//! which runtime question. Root naming is stable and whitespace-free so the
//! grammar text format stays diffable:
//!
//! ```text
//! D1@length              demand transformer, parameter 1 of `length`
//! sig@length             summary demand on `length`'s result
//! S_all                  the all-paths demand (print driver, update cells)
//! env@length:entry:l     liveness of `l` at the entry collection point
//! env@if5.then:x         liveness of `x` at the collection point after
//!                        if ψ5 commits to its then branch
//! fr@let3:x  fr@if5:x    frame-site liveness: a frame whose saved control
//! fr@ret7:x              is the let π3 / if ψ5 / return ψ7
//! clo@p3:x               demand on the copy of `x` captured by the closure
//!                        allocated at let π3 (its default descriptor)
//! clo@p3:x@if5.then      the same, narrowed once if ψ5 takes then
//! ```
//!
//! `main` is the entry point: the demand on its result is exactly ε (weak
//! head normal form — programs return atoms to the printer's first probe;
//! deeper probes are rooted separately through the print stack's all-paths
//! automaton). Strings arising inside `main` therefore carry no summary
//! suffix, and call sites inside `main` contribute suffix-free productions
//! to callee summaries, which is what makes summary demands like
//! `sig@length → ε | 2 sig@length` come out in closed form.

use crate::walk::{shape, walk_function, Branch, DemandSet, Shape, WSym, WalkResult};
use lethe_automata::{Grammar, NtId, Sym};
use lethe_lang::{Pi, Program, Psi};
use std::collections::BTreeMap;

/// Names of every root nonterminal, grouped by the runtime question each
/// answers. Values are nonterminal names in [`Analysis::grammar`]; a root
/// with no productions denotes the empty language (the variable is dead).
#[derive(Debug, Clone, Default)]
pub struct Roots {
    /// `(function, 1-based parameter index)` → demand transformer.
    pub demand: BTreeMap<(String, usize), String>,
    /// Function → summary demand on its result. `main` has none.
    pub summary: BTreeMap<String, String>,
    /// The all-paths demand nonterminal.
    pub s_all: String,
    /// Function → parameter → liveness at the entry collection point.
    pub entry: BTreeMap<String, BTreeMap<String, String>>,
    /// `(ψ, branch)` → in-scope variable → liveness at the collection point
    /// right after the branch commits.
    pub after_if: BTreeMap<(Psi, Branch), BTreeMap<String, String>>,
    /// Let π → in-scope variable → liveness for a frame whose saved control
    /// is that let (pushed when its selector/test/primitive forces an
    /// operand).
    pub let_site: BTreeMap<Pi, BTreeMap<String, String>>,
    /// If ψ → in-scope variable → liveness for a frame forcing that
    /// condition.
    pub if_site: BTreeMap<Psi, BTreeMap<String, String>>,
    /// Return ψ → (returned variable, its liveness root) for a frame forcing
    /// the returned value.
    pub return_site: BTreeMap<Psi, (String, String)>,
    /// Let π → captured variable → default closure descriptor root.
    pub closure_default: BTreeMap<Pi, BTreeMap<String, String>>,
    /// `(π, ψ, branch)` → captured variable → narrowed descriptor root,
    /// defined for every let enclosing the if ψ.
    pub closure_variant: BTreeMap<(Pi, Psi, Branch), BTreeMap<String, String>>,
    /// `(ψ, branch)` → the lets whose live closures can be narrowed when
    /// that branch commits (the lets enclosing ψ, outermost first).
    pub refinable: BTreeMap<(Psi, Branch), Vec<Pi>>,
}

/// The liveness grammar plus its root index.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub grammar: Grammar,
    pub roots: Roots,
}

pub(crate) fn nt_demand(f: &str, i: usize) -> String {
    format!("D{i}@{f}")
}
pub(crate) fn nt_sigma(f: &str) -> String {
    format!("sig@{f}")
}
pub(crate) const S_ALL: &str = "S_all";
fn nt_entry(f: &str, v: &str) -> String {
    format!("env@{f}:entry:{v}")
}
fn nt_after_if(psi: Psi, b: Branch, v: &str) -> String {
    format!("env@if{psi}.{b}:{v}")
}
fn nt_let_site(pi: Pi, v: &str) -> String {
    format!("fr@let{pi}:{v}")
}
fn nt_if_site(psi: Psi, v: &str) -> String {
    format!("fr@if{psi}:{v}")
}
fn nt_ret_site(psi: Psi, v: &str) -> String {
    format!("fr@ret{psi}:{v}")
}
fn nt_clo(pi: Pi, v: &str) -> String {
    format!("clo@p{pi}:{v}")
}
fn nt_clo_variant(pi: Pi, v: &str, psi: Psi, b: Branch) -> String {
    format!("clo@p{pi}:{v}@if{psi}.{b}")
}

struct Emitter {
    g: Grammar,
}

impl Emitter {
    fn translate(&mut self, w: &[WSym]) -> Vec<Sym> {
        w.iter()
            .map(|s| match s {
                WSym::T0 => Sym::T0,
                WSym::T1 => Sym::T1,
                WSym::B0 => Sym::B0,
                WSym::B1 => Sym::B1,
                WSym::Two => Sym::Two,
                WSym::D(f, i) => Sym::Nt(self.g.nt(&nt_demand(f, *i))),
            })
            .collect()
    }

    /// Add one production per string, with the summary suffix of the
    /// enclosing function (none inside `main`).
    fn emit_set(&mut self, name: &str, set: &DemandSet, suffix: Option<NtId>) {
        let nt = self.g.nt(name);
        for w in set {
            let mut rhs = self.translate(w);
            if let Some(s) = suffix {
                rhs.push(Sym::Nt(s));
            }
            self.g.add(nt, rhs);
        }
    }

    /// Intern a root that may have no productions (dead variable).
    fn declare(&mut self, name: &str) {
        self.g.nt(name);
    }
}

/// Per-function artifacts kept for table construction.
struct FnArtifacts {
    name: String,
    walk: WalkResult,
    shape: Shape,
    /// Restricted walks keyed by (ψ, branch).
    variants: BTreeMap<(Psi, Branch), WalkResult>,
}

/// Run the liveness analysis over a validated, renamed, labeled program and
/// produce its grammar and roots.
pub fn build_grammar(p: &Program) -> Analysis {
    assert!(
        p.main_def().body.pi() != 0,
        "program must be labeled before analysis"
    );

    let mut em = Emitter { g: Grammar::new() };
    // The all-paths demand: every access path into the printed result.
    let s_all = em.g.nt(S_ALL);
    em.g.add(s_all, vec![]);
    em.g.add(s_all, vec![Sym::T0, Sym::Nt(s_all)]);
    em.g.add(s_all, vec![Sym::T1, Sym::Nt(s_all)]);

    // Walk every function: one full pass, plus one restricted pass per
    // if-branch for refinement variants.
    let mut fns = Vec::new();
    for def in &p.defs {
        let walk = walk_function(def, None);
        let sh = shape(def);
        let mut variants = BTreeMap::new();
        for (psi, ifs) in &sh.ifs {
            for (b, pts) in [
                (Branch::Then, &ifs.eval_then),
                (Branch::Else, &ifs.eval_else),
            ] {
                variants.insert((*psi, b), walk_function(def, Some(pts)));
            }
        }
        fns.push(FnArtifacts {
            name: def.name.clone(),
            walk,
            shape: sh,
            variants,
        });
    }

    let mut roots = Roots {
        s_all: S_ALL.to_owned(),
        ..Roots::default()
    };

    for (fa, def) in fns.iter().zip(&p.defs) {
        let f = fa.name.as_str();
        let suffix = if f == Program::MAIN {
            None
        } else {
            Some(em.g.nt(&nt_sigma(f)))
        };
        if f != Program::MAIN {
            roots
                .summary
                .insert(f.to_owned(), nt_sigma(f));
        }

        // Demand transformers and entry-point roots from the top
        // environment. The transformer is the σ-factored form; the entry
        // root is the same strings with the summary suffix attached.
        for (i, param) in def.params.iter().enumerate() {
            let dset = fa.walk.top.stack.get(param).cloned().unwrap_or_default();
            let dname = nt_demand(f, i + 1);
            em.declare(&dname);
            em.emit_set(&dname, &dset, None);
            roots.demand.insert((f.to_owned(), i + 1), dname);

            let ename = nt_entry(f, param);
            em.declare(&ename);
            em.emit_set(&ename, &dset, suffix);
            roots
                .entry
                .entry(f.to_owned())
                .or_default()
                .insert(param.clone(), ename);
        }
        if def.params.is_empty() {
            roots.entry.entry(f.to_owned()).or_default();
        }

        // Summary-demand productions from this function's call sites.
        for (callee, dset) in &fa.walk.sigma_calls {
            em.emit_set(&nt_sigma(callee), dset, suffix);
        }

        // Closure descriptors: defaults from the full walk, variants from
        // the restricted walks, covering every captured variable even when
        // its narrowed demand is empty.
        for (pi, ls) in &fa.shape.lets {
            let merged = fa.walk.top.clo_merged(*pi);
            let mut table = BTreeMap::new();
            for v in &ls.free_vars {
                let name = nt_clo(*pi, v);
                em.declare(&name);
                if let Some(set) = merged.get(v) {
                    em.emit_set(&name, set, suffix);
                }
                table.insert(v.clone(), name);
            }
            roots.closure_default.insert(*pi, table);
        }
        for (psi, ifs) in &fa.shape.ifs {
            for b in [Branch::Then, Branch::Else] {
                roots
                    .refinable
                    .insert((*psi, b), ifs.ancestor_lets.clone());
                let wr = &fa.variants[&(*psi, b)];
                for pi in &ifs.ancestor_lets {
                    let merged = wr.top.clo_merged(*pi);
                    let ls = &fa.shape.lets[pi];
                    let mut table = BTreeMap::new();
                    for v in &ls.free_vars {
                        let name = nt_clo_variant(*pi, v, *psi, b);
                        em.declare(&name);
                        if let Some(set) = merged.get(v) {
                            em.emit_set(&name, set, suffix);
                        }
                        table.insert(v.clone(), name);
                    }
                    roots.closure_variant.insert((*pi, *psi, b), table);
                }
            }
        }

        // Collection points after a branch commits: the branch's own
        // environment, over every variable in scope there (dead ones get
        // explicit empty roots).
        for (psi, ifs) in &fa.shape.ifs {
            for (b, branch_pi) in [(Branch::Then, ifs.then_pi), (Branch::Else, ifs.else_pi)] {
                let env = &fa.walk.node_env[&branch_pi];
                let mut table = BTreeMap::new();
                for v in &fa.shape.scope_at[&ifs.pi] {
                    let name = nt_after_if(*psi, b, v);
                    em.declare(&name);
                    if let Some(set) = env.stack.get(v) {
                        em.emit_set(&name, set, suffix);
                    }
                    table.insert(v.clone(), name);
                }
                roots.after_if.insert((*psi, b), table);
            }
        }

        // Frame-site tables: the liveness of the saved control.
        for (pi, ls) in &fa.shape.lets {
            if !ls.can_force {
                continue;
            }
            let env = &fa.walk.node_env[pi];
            let mut table = BTreeMap::new();
            for v in &fa.shape.scope_at[pi] {
                let name = nt_let_site(*pi, v);
                em.declare(&name);
                if let Some(set) = env.stack.get(v) {
                    em.emit_set(&name, set, suffix);
                }
                table.insert(v.clone(), name);
            }
            roots.let_site.insert(*pi, table);
        }
        for (psi, ifs) in &fa.shape.ifs {
            let env = &fa.walk.node_env[&ifs.pi];
            let mut table = BTreeMap::new();
            for v in &fa.shape.scope_at[&ifs.pi] {
                let name = nt_if_site(*psi, v);
                em.declare(&name);
                if let Some(set) = env.stack.get(v) {
                    em.emit_set(&name, set, suffix);
                }
                table.insert(v.clone(), name);
            }
            roots.if_site.insert(*psi, table);
        }
        for (psi, rs) in &fa.shape.rets {
            let name = nt_ret_site(*psi, &rs.var);
            em.declare(&name);
            let nt = em.g.nt(&name);
            match suffix {
                Some(s) => em.g.add(nt, vec![Sym::Nt(s)]),
                None => em.g.add(nt, vec![]),
            };
            roots.return_site.insert(*psi, (rs.var.clone(), name));
        }
    }

    Analysis {
        grammar: em.g,
        roots,
    }
}

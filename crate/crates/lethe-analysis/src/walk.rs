//! The symbolic liveness walk over one function body.
//!
//! Liveness of a variable is the set of access paths into its value that the
//! rest of the computation may need. The walk computes it backwards over the
//! body, as a set of *symbolic strings*: sequences over the selector symbols
//! `0`/`1`, the constructor-side symbols `0̄`/`1̄`, the demand marker `2`, and
//! references to per-function demand transformers `D_f^i`. Every string is
//! implicitly suffixed by the formal demand σ of the enclosing function —
//! the walk never needs σ's value, which is what lets one pass serve every
//! call site (the closed form: liveness = prefix-language · σ).
//!
//! Per expression form:
//!
//! * `return x` contributes `x.σ` — the bare empty prefix.
//! * `if x e1 e2` contributes the union of both branches plus `x.2σ` (the
//!   condition is forced to weak head normal form; `2` encodes "ε if the
//!   continuation demands anything at all, else nothing").
//! * `let x ← s in e` first walks the body, takes σ′ = every demand on `x`
//!   recorded there, then adds the references `s` makes under σ′. References
//!   are recorded twice, deliberately: once keyed by `(variable, π,
//!   position)` — the demand on the *closure's captured copy* of the
//!   variable, which outlives the stack scope — and once folded into the
//!   plain stack variable, since the stack binding must keep the datum alive
//!   until the closure is built.
//!
//! The walk can be *restricted* to a set Ψ of evaluation points: ground
//! contributions (`return`, if-condition) outside Ψ are suppressed, and
//! every demand chain that only fed those points collapses to the empty set
//! on its own. Restricted walks compute the narrowed closure descriptors
//! used after an `if` commits to a branch: only chains ending inside the
//! taken branch can still fire.

use lethe_lang::{App, Expr, FunDef, Pi, Psi};
use std::collections::{BTreeMap, BTreeSet};

/// A symbol in a liveness string. Mirrors the grammar alphabet, with
/// demand-transformer references kept by function name and parameter index
/// until emission interns them as nonterminals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum WSym {
    T0,
    T1,
    B0,
    B1,
    Two,
    /// `D_f^i`, 1-based parameter index.
    D(String, usize),
}

/// A finite set of symbolic strings, each implicitly ending in the enclosing
/// function's formal demand σ. The empty set is the null demand ∅ — never
/// conflate it with `{ε}` (the singleton empty string), which means "the
/// value itself is needed".
pub(crate) type DemandSet = BTreeSet<Vec<WSym>>;

/// Prepend one symbol to every string of a set. Adjacent demand markers
/// collapse (`2·2 = 2`) — the only rewrite applied at construction time; all
/// other simplification happens in the automata pipeline.
pub(crate) fn prepend(sym: WSym, set: &DemandSet) -> DemandSet {
    set.iter()
        .map(|w| {
            if sym == WSym::Two && w.first() == Some(&WSym::Two) {
                w.clone()
            } else {
                let mut out = Vec::with_capacity(w.len() + 1);
                out.push(sym.clone());
                out.extend(w.iter().cloned());
                out
            }
        })
        .collect()
}

/// A liveness environment: what each variable must keep reachable.
///
/// `stack` entries are demands on the stack binding of a variable; `clo`
/// entries are demands on the copy captured by the closure allocated at
/// `π`, one entry per operand position so repeated operands stay distinct
/// until emission merges them per `(var, π)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct LiveEnv {
    pub stack: BTreeMap<String, DemandSet>,
    pub clo: BTreeMap<(String, Pi, u32), DemandSet>,
}

impl LiveEnv {
    fn union_into(&mut self, other: LiveEnv) {
        for (k, v) in other.stack {
            self.stack.entry(k).or_default().extend(v);
        }
        for (k, v) in other.clo {
            self.clo.entry(k).or_default().extend(v);
        }
    }

    /// Total demand on `var`: stack entry plus every captured copy.
    pub fn total_for(&self, var: &str) -> DemandSet {
        let mut out = self.stack.get(var).cloned().unwrap_or_default();
        for ((v, _, _), set) in &self.clo {
            if v == var {
                out.extend(set.iter().cloned());
            }
        }
        out
    }

    /// Captured-copy demands for the closure allocated at `pi`, positions
    /// merged per variable.
    pub fn clo_merged(&self, pi: Pi) -> BTreeMap<String, DemandSet> {
        let mut out: BTreeMap<String, DemandSet> = BTreeMap::new();
        for ((v, p, _), set) in &self.clo {
            if *p == pi {
                out.entry(v.clone()).or_default().extend(set.iter().cloned());
            }
        }
        out
    }
}

/// References an application makes under demand `sigma`, keyed by captured
/// copy. Empty demand yields the empty environment for every form — the
/// null-demand absorption rule.
pub(crate) fn ref_app(s: &App, sigma: &DemandSet, pi: Pi) -> LiveEnv {
    let mut env = LiveEnv::default();
    if sigma.is_empty() {
        return env;
    }
    let mut add = |var: &str, pos: u32, set: DemandSet| {
        env.clo
            .entry((var.to_owned(), pi, pos))
            .or_default()
            .extend(set);
    };
    match s {
        App::Const(_) => {}
        App::Cons(x, y) => {
            add(x, 0, prepend(WSym::B0, sigma));
            add(y, 1, prepend(WSym::B1, sigma));
        }
        App::Car(x) => {
            let mut set = prepend(WSym::Two, sigma);
            set.extend(prepend(WSym::T0, sigma));
            add(x, 0, set);
        }
        App::Cdr(x) => {
            let mut set = prepend(WSym::Two, sigma);
            set.extend(prepend(WSym::T1, sigma));
            add(x, 0, set);
        }
        App::NullQ(x) => {
            add(x, 0, prepend(WSym::Two, sigma));
        }
        App::Prim(_, x, y) => {
            add(x, 0, prepend(WSym::Two, sigma));
            add(y, 1, prepend(WSym::Two, sigma));
        }
        App::Call(f, xs) => {
            for (i, x) in xs.iter().enumerate() {
                add(x, i as u32, prepend(WSym::D(f.clone(), i + 1), sigma));
            }
        }
    }
    env
}

/// Result of walking one function body.
pub(crate) struct WalkResult {
    /// Environment at the top of the body — parameter entries define the
    /// demand transformers; captured-copy entries define the closure
    /// descriptors.
    pub top: LiveEnv,
    /// Environment at every expression node (by its π), i.e. the liveness of
    /// the continuation that starts there. Frame-site and collection-point
    /// tables read these.
    pub node_env: BTreeMap<Pi, LiveEnv>,
    /// Demand observed at each call site: (callee, demand on its result).
    /// Emission turns these into summary-demand productions.
    pub sigma_calls: Vec<(String, DemandSet)>,
}

struct Walker<'a> {
    restrict: Option<&'a BTreeSet<Psi>>,
    node_env: BTreeMap<Pi, LiveEnv>,
    sigma_calls: Vec<(String, DemandSet)>,
}

impl Walker<'_> {
    fn allows(&self, psi: Psi) -> bool {
        self.restrict.map(|set| set.contains(&psi)).unwrap_or(true)
    }

    fn walk(&mut self, e: &Expr) -> LiveEnv {
        let env = match e {
            Expr::Return { psi, var, .. } => {
                let mut env = LiveEnv::default();
                if self.allows(*psi) {
                    env.stack.insert(var.clone(), BTreeSet::from([vec![]]));
                }
                env
            }
            Expr::If {
                psi,
                cond,
                then_branch,
                else_branch,
                ..
            } => {
                let mut env = self.walk(then_branch);
                let else_env = self.walk(else_branch);
                env.union_into(else_env);
                if self.allows(*psi) {
                    env.stack
                        .entry(cond.clone())
                        .or_default()
                        .insert(vec![WSym::Two]);
                }
                env
            }
            Expr::Let {
                pi, var, rhs, body, ..
            } => {
                let mut env = self.walk(body);
                let sigma_p = env.total_for(var);
                if let App::Call(g, _) = rhs {
                    if !sigma_p.is_empty() {
                        self.sigma_calls.push((g.clone(), sigma_p.clone()));
                    }
                }
                // The bound variable's entry becomes σ′ (it already subsumes
                // the body's entries by construction).
                env.stack.insert(var.clone(), sigma_p.clone());
                let refs = ref_app(rhs, &sigma_p, *pi);
                for ((y, p, pos), set) in refs.clo {
                    // Fold the captured-copy demand back into the stack
                    // binding: the binding keeps y alive up to closure
                    // creation.
                    env.stack
                        .entry(y.clone())
                        .or_default()
                        .extend(set.iter().cloned());
                    env.clo.entry((y, p, pos)).or_default().extend(set);
                }
                env
            }
        };
        self.node_env.insert(e.pi(), env.clone());
        env
    }
}

/// Walk a function body. With `restrict = Some(Ψ)`, only evaluation points
/// in Ψ contribute ground demands.
pub(crate) fn walk_function(def: &FunDef, restrict: Option<&BTreeSet<Psi>>) -> WalkResult {
    let mut w = Walker {
        restrict,
        node_env: BTreeMap::new(),
        sigma_calls: Vec::new(),
    };
    let top = w.walk(&def.body);
    WalkResult {
        top,
        node_env: w.node_env,
        sigma_calls: w.sigma_calls,
    }
}

/// Which branch of an `if` was taken. Used as a table key everywhere a
/// collection point or refinement is branch-specific.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Then,
    Else,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::Then => "then",
            Branch::Else => "else",
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Structural facts about one function body that emission needs alongside
/// the walk: scopes, let/if/return inventories, evaluation points per
/// subtree, and ancestor chains.
pub(crate) struct Shape {
    /// Variables in scope at each node (parameters, then binders of
    /// enclosing lets, outermost first). At a `let`, its own binder is not
    /// yet in scope.
    pub scope_at: BTreeMap<Pi, Vec<String>>,
    pub lets: BTreeMap<Pi, LetShape>,
    pub ifs: BTreeMap<Psi, IfShape>,
    pub rets: BTreeMap<Psi, RetShape>,
}

pub(crate) struct LetShape {
    pub var: String,
    pub free_vars: Vec<String>,
    /// Whether executing this let can force an operand and push a frame
    /// (selector, test, and primitive forms; constants, cons, and calls
    /// never force here).
    pub can_force: bool,
}

pub(crate) struct IfShape {
    pub pi: Pi,
    pub cond: String,
    pub then_pi: Pi,
    pub else_pi: Pi,
    /// Evaluation points inside each branch subtree.
    pub eval_then: BTreeSet<Psi>,
    pub eval_else: BTreeSet<Psi>,
    /// Lets enclosing this if, outermost first: exactly the closures that
    /// can already exist in the current activation when the branch commits.
    pub ancestor_lets: Vec<Pi>,
}

pub(crate) struct RetShape {
    pub var: String,
}

fn eval_points(e: &Expr) -> BTreeSet<Psi> {
    let mut out = BTreeSet::new();
    e.visit(&mut |n| match n {
        Expr::If { psi, .. } | Expr::Return { psi, .. } => {
            out.insert(*psi);
        }
        Expr::Let { .. } => {}
    });
    out
}

pub(crate) fn shape(def: &FunDef) -> Shape {
    let mut s = Shape {
        scope_at: BTreeMap::new(),
        lets: BTreeMap::new(),
        ifs: BTreeMap::new(),
        rets: BTreeMap::new(),
    };
    fn go(e: &Expr, scope: &mut Vec<String>, anc: &mut Vec<Pi>, s: &mut Shape) {
        s.scope_at.insert(e.pi(), scope.clone());
        match e {
            Expr::Return { psi, var, .. } => {
                s.rets.insert(*psi, RetShape { var: var.clone() });
            }
            Expr::If {
                pi,
                psi,
                cond,
                then_branch,
                else_branch,
                ..
            } => {
                s.ifs.insert(
                    *psi,
                    IfShape {
                        pi: *pi,
                        cond: cond.clone(),
                        then_pi: then_branch.pi(),
                        else_pi: else_branch.pi(),
                        eval_then: eval_points(then_branch),
                        eval_else: eval_points(else_branch),
                        ancestor_lets: anc.clone(),
                    },
                );
                go(then_branch, scope, anc, s);
                go(else_branch, scope, anc, s);
            }
            Expr::Let {
                pi, var, rhs, body, ..
            } => {
                s.lets.insert(
                    *pi,
                    LetShape {
                        var: var.clone(),
                        free_vars: rhs.free_vars().iter().map(|v| v.to_string()).collect(),
                        can_force: matches!(
                            rhs,
                            App::Car(_) | App::Cdr(_) | App::NullQ(_) | App::Prim(..)
                        ),
                    },
                );
                scope.push(var.clone());
                anc.push(*pi);
                go(body, scope, anc, s);
                anc.pop();
                scope.pop();
            }
        }
    }
    let mut scope = def.params.clone();
    let mut anc = Vec::new();
    go(&def.body, &mut scope, &mut anc, &mut s);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use lethe_lang::{assign_labels, parse_program, rename_distinct};

    fn prep(src: &str) -> lethe_lang::Program {
        assign_labels(&rename_distinct(&parse_program(src).unwrap()).unwrap())
    }

    #[test]
    fn null_demand_absorbs_every_form() {
        let empty = DemandSet::new();
        for app in [
            App::Const(lethe_lang::Const::Num(5)),
            App::Cons("x".into(), "y".into()),
            App::Car("x".into()),
            App::Cdr("x".into()),
            App::NullQ("x".into()),
            App::Prim(lethe_lang::PrimOp::Add, "x".into(), "y".into()),
            App::Call("f".into(), vec!["x".into()]),
        ] {
            let env = ref_app(&app, &empty, 3);
            assert!(env.stack.is_empty() && env.clo.is_empty(), "{app:?}");
        }
    }

    #[test]
    fn adjacent_demand_markers_collapse() {
        let sigma: DemandSet = BTreeSet::from([vec![WSym::Two], vec![WSym::T1]]);
        let out = prepend(WSym::Two, &sigma);
        assert_eq!(
            out,
            BTreeSet::from([vec![WSym::Two], vec![WSym::Two, WSym::T1]])
        );
    }

    #[test]
    fn straight_line_selector_chain() {
        // q is returned; p feeds q through cdr; t is captured twice by the
        // cons. Hand-evaluating the equations gives:
        //   σ′_q = {ε};  p: {2, 1};  t: pos0 = 0̄·{2,1}, pos1 = 1̄·{2,1}.
        let p = prep(
            "(define (main)\n  (let (t 1)\n    (let (p (cons t t))\n      (let (q (cdr p))\n        (return q)))))",
        );
        let def = p.main_def();
        let r = walk_function(def, None);
        use WSym::*;
        assert_eq!(
            r.top.stack.get("q"),
            Some(&BTreeSet::from([vec![] as Vec<WSym>]))
        );
        assert_eq!(
            r.top.stack.get("p"),
            Some(&BTreeSet::from([vec![Two], vec![T1]]))
        );
        // Stack entry for t folds both captured positions together.
        assert_eq!(
            r.top.stack.get("t"),
            Some(&BTreeSet::from([
                vec![B0, Two],
                vec![B0, T1],
                vec![B1, Two],
                vec![B1, T1],
            ]))
        );
        // Captured copies stay per-position until merged.
        let pi_cons = match find_let_pi(def, "p") {
            Some(pi) => pi,
            None => panic!("no let for p"),
        };
        assert_eq!(
            r.top.clo.get(&("t".into(), pi_cons, 0)),
            Some(&BTreeSet::from([vec![B0, Two], vec![B0, T1]]))
        );
        assert_eq!(
            r.top.clo.get(&("t".into(), pi_cons, 1)),
            Some(&BTreeSet::from([vec![B1, Two], vec![B1, T1]]))
        );
    }

    fn find_let_pi(def: &FunDef, var: &str) -> Option<Pi> {
        let mut found = None;
        def.body.visit(&mut |e| {
            if let Expr::Let { pi, var: v, .. } = e {
                if v == var {
                    found = Some(*pi);
                }
            }
        });
        found
    }

    #[test]
    fn restricted_walk_drops_chains_to_suppressed_points() {
        // x is returned in the then-branch only. Restricting to the else
        // branch's evaluation points must erase x's liveness entirely.
        let p = prep(
            "(define (main)\n  (let (x 1)\n    (let (c 0)\n      (if c (return x) (return c)))))",
        );
        let def = p.main_def();
        let full = walk_function(def, None);
        assert!(full.top.stack.contains_key("x"));
        let sh = shape(def);
        let if_shape = sh.ifs.values().next().unwrap();
        let restricted = walk_function(def, Some(&if_shape.eval_else));
        assert!(!restricted.top.stack.contains_key("x"));
        assert!(restricted.top.stack.contains_key("c"));
    }

    #[test]
    fn shape_records_scopes_ancestors_and_eval_points() {
        let p = prep(
            "(define (main)\n  (let (a 1)\n    (let (b (null? a))\n      (if b\n          (return a)\n          (let (d (cdr a))\n            (return d))))))",
        );
        let def = p.main_def();
        let sh = shape(def);
        let (psi, ifs) = sh.ifs.iter().next().unwrap();
        assert_eq!(ifs.cond, "b");
        // Ancestors are the two enclosing lets, outermost first.
        let pis: Vec<Pi> = sh.lets.keys().copied().collect();
        assert_eq!(ifs.ancestor_lets, vec![pis[0], pis[1]]);
        // The else branch holds the inner let's return and nothing else.
        assert_eq!(ifs.eval_else.len(), 1);
        assert_eq!(ifs.eval_then.len(), 1);
        assert!(!ifs.eval_then.contains(psi));
        // Scope at the if: parameterless main, binders a and b.
        assert_eq!(sh.scope_at[&ifs.pi], vec!["a", "b"]);
        // can_force: null? and cdr yes, constants no.
        let forcing: Vec<bool> = sh.lets.values().map(|l| l.can_force).collect();
        assert_eq!(forcing, vec![false, true, true]);
    }
}

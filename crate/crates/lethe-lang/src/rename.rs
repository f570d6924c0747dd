//! Alpha-renaming to globally distinct binders.
//!
//! Downstream analyses key liveness environments, closure descriptors, and
//! collection-point root tables by bare variable name. That only works if a
//! name identifies a unique binding across the whole program, so this pass
//! renames every binder (parameter or let) that reuses a name seen earlier in
//! textual order, appending `_2`, `_3`, ... The first occurrence keeps its
//! source name, which keeps diagnostics and emitted grammars readable.
//!
//! The pass also performs scope resolution and is where unbound-variable
//! errors surface.

use crate::ast::{App, Expr, FunDef, Program};
use crate::LangError;
use std::collections::{HashMap, HashSet};

/// Rename binders so that every bound variable is unique program-wide.
/// Deterministic: renaming is driven purely by textual order. Renaming an
/// already-distinct program is the identity.
///
/// Errors on variables used outside any enclosing binding.
pub fn rename_distinct(p: &Program) -> Result<Program, LangError> {
    // All names that appear as binders anywhere; generated names must avoid
    // colliding with these as well as with each other.
    let mut taken: HashSet<String> = HashSet::new();
    for d in &p.defs {
        for q in &d.params {
            taken.insert(q.clone());
        }
        d.body.visit(&mut |e| {
            if let Expr::Let { var, .. } = e {
                taken.insert(var.clone());
            }
        });
    }

    let mut used: HashSet<String> = HashSet::new();
    let mut defs = Vec::with_capacity(p.defs.len());
    for d in &p.defs {
        defs.push(rename_def(d, &mut used, &taken)?);
    }
    Ok(Program { defs })
}

fn fresh(base: &str, used: &mut HashSet<String>, taken: &HashSet<String>) -> String {
    if !used.contains(base) {
        used.insert(base.to_string());
        return base.to_string();
    }
    let mut i = 2u64;
    loop {
        let candidate = format!("{base}_{i}");
        // A generated name must not collide with any *source* binder either,
        // or a later textual occurrence of that source binder would capture it.
        if !used.contains(&candidate) && !taken.contains(&candidate) {
            used.insert(candidate.clone());
            return candidate;
        }
        i += 1;
    }
}

fn rename_def(
    d: &FunDef,
    used: &mut HashSet<String>,
    taken: &HashSet<String>,
) -> Result<FunDef, LangError> {
    // Scope maps source name -> renamed name, innermost binding wins.
    let mut scope: HashMap<String, String> = HashMap::new();
    let mut params = Vec::with_capacity(d.params.len());
    for q in &d.params {
        let r = fresh(q, used, taken);
        scope.insert(q.clone(), r.clone());
        params.push(r);
    }
    let body = rename_expr(&d.body, &mut scope, used, taken, &d.name)?;
    Ok(FunDef {
        name: d.name.clone(),
        params,
        body,
        span: d.span,
    })
}

fn lookup(
    scope: &HashMap<String, String>,
    v: &str,
    fun: &str,
    span: crate::ast::Span,
) -> Result<String, LangError> {
    scope.get(v).cloned().ok_or_else(|| {
        LangError::Parse {
            line: span.line,
            col: span.col,
            msg: format!("unbound variable `{v}` in function `{fun}`"),
        }
    })
}

fn rename_expr(
    e: &Expr,
    scope: &mut HashMap<String, String>,
    used: &mut HashSet<String>,
    taken: &HashSet<String>,
    fun: &str,
) -> Result<Expr, LangError> {
    match e {
        Expr::Let {
            pi,
            var,
            rhs,
            body,
            span,
        } => {
            // The right-hand side is evaluated in the outer scope (no
            // recursive lets), so resolve it before binding `var`.
            let rhs = rename_app(rhs, scope, fun, *span)?;
            let new_var = fresh(var, used, taken);
            let shadowed = scope.insert(var.clone(), new_var.clone());
            let body = rename_expr(body, scope, used, taken, fun)?;
            match shadowed {
                Some(old) => scope.insert(var.clone(), old),
                None => scope.remove(var),
            };
            Ok(Expr::Let {
                pi: *pi,
                var: new_var,
                rhs,
                body: Box::new(body),
                span: *span,
            })
        }
        Expr::If {
            pi,
            psi,
            cond,
            then_branch,
            else_branch,
            span,
        } => Ok(Expr::If {
            pi: *pi,
            psi: *psi,
            cond: lookup(scope, cond, fun, *span)?,
            then_branch: Box::new(rename_expr(then_branch, scope, used, taken, fun)?),
            else_branch: Box::new(rename_expr(else_branch, scope, used, taken, fun)?),
            span: *span,
        }),
        Expr::Return { pi, psi, var, span } => Ok(Expr::Return {
            pi: *pi,
            psi: *psi,
            var: lookup(scope, var, fun, *span)?,
            span: *span,
        }),
    }
}

fn rename_app(
    a: &App,
    scope: &HashMap<String, String>,
    fun: &str,
    span: crate::ast::Span,
) -> Result<App, LangError> {
    let f = |v: &String| lookup(scope, v, fun, span);
    Ok(match a {
        App::Const(c) => App::Const(*c),
        App::Cons(x, y) => App::Cons(f(x)?, f(y)?),
        App::Car(x) => App::Car(f(x)?),
        App::Cdr(x) => App::Cdr(f(x)?),
        App::NullQ(x) => App::NullQ(f(x)?),
        App::Prim(op, x, y) => App::Prim(*op, f(x)?, f(y)?),
        App::Call(g, args) => App::Call(
            g.clone(),
            args.iter().map(f).collect::<Result<Vec<_>, _>>()?,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse_program;

    #[test]
    fn renames_cross_function_collisions() {
        let p = parse_program(
            "(define (f x) (return x))\
             (define (g x) (let (y (f x)) (return y)))\
             (define (main) (let (x 1) (let (r (g x)) (return r))))",
        )
        .unwrap();
        let p = rename_distinct(&p).unwrap();
        assert_eq!(p.defs[0].params, vec!["x"]);
        assert_eq!(p.defs[1].params, vec!["x_2"]);
        // g's body must reference the renamed parameter.
        match &p.defs[1].body {
            Expr::Let { rhs, .. } => assert_eq!(*rhs, App::Call("f".into(), vec!["x_2".into()])),
            _ => panic!(),
        }
        // main's let keeps its own x renamed distinctly.
        match &p.defs[2].body {
            Expr::Let { var, .. } => assert_eq!(var, "x_3"),
            _ => panic!(),
        }
    }

    #[test]
    fn shadowing_resolves_to_innermost() {
        let p = parse_program(
            "(define (main) (let (x 1) (let (x (+ x x)) (return x))))",
        )
        .unwrap();
        let p = rename_distinct(&p).unwrap();
        match &p.main_def().body {
            Expr::Let { var, body, .. } => {
                assert_eq!(var, "x");
                match &**body {
                    Expr::Let { var, rhs, body, .. } => {
                        assert_eq!(var, "x_2");
                        // RHS evaluated in the outer scope: both operands are
                        // the outer x.
                        assert_eq!(
                            *rhs,
                            App::Prim(crate::PrimOp::Add, "x".into(), "x".into())
                        );
                        assert!(
                            matches!(&**body, Expr::Return { var, .. } if var == "x_2")
                        );
                    }
                    _ => panic!(),
                }
            }
            _ => panic!(),
        }
    }

    #[test]
    fn generated_names_avoid_source_names() {
        // Source already contains x_2 *after* two xs; the renamer must not
        // collide with it.
        let p = parse_program(
            "(define (f x) (return x))\
             (define (g x) (return x))\
             (define (main) (let (x_2 1) (let (r (f x_2)) (return r))))",
        )
        .unwrap();
        let p = rename_distinct(&p).unwrap();
        let names: Vec<_> = p.defs.iter().flat_map(|d| d.params.clone()).collect();
        let mut all = names.clone();
        p.defs.iter().for_each(|d| {
            d.body.visit(&mut |e| {
                if let Expr::Let { var, .. } = e {
                    all.push(var.clone());
                }
            })
        });
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len(), "binders not distinct: {all:?}");
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let p = parse_program("(define (main) (let (x (car y)) (return x)))").unwrap();
        let e = rename_distinct(&p).unwrap_err();
        assert!(e.to_string().contains("unbound variable `y`"), "got {e}");
    }

    #[test]
    fn renaming_is_idempotent() {
        let p = parse_program(
            "(define (f x) (return x))\
             (define (g x) (let (y (f x)) (return y)))\
             (define (main) (let (x 1) (let (r (g x)) (return r))))",
        )
        .unwrap();
        let once = rename_distinct(&p).unwrap();
        let twice = rename_distinct(&once).unwrap();
        assert_eq!(once, twice);
    }
}

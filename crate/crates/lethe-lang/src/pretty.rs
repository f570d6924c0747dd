//! Canonical pretty-printer.
//!
//! Produces text that [`crate::parse_program`] reads back to a structurally
//! identical AST (labels and spans aside). Used by the CLI to echo programs
//! and by tests as a round-trip oracle.

use crate::ast::{App, Expr, FunDef, Program};
use std::fmt::Write;

/// Render a program in canonical form: one definition per paragraph,
/// two-space indentation, let-bodies on the following line.
pub fn pretty_print(p: &Program) -> String {
    let mut out = String::new();
    for (i, d) in p.defs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_def(&mut out, d);
    }
    out
}

fn write_def(out: &mut String, d: &FunDef) {
    let _ = write!(out, "(define ({}", d.name);
    for p in &d.params {
        let _ = write!(out, " {p}");
    }
    let _ = writeln!(out, ")");
    write_expr(out, &d.body, 1);
    let _ = writeln!(out, ")");
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_expr(out: &mut String, e: &Expr, depth: usize) {
    indent(out, depth);
    match e {
        Expr::Let { var, rhs, body, .. } => {
            let _ = writeln!(out, "(let ({var} {})", app_text(rhs));
            write_expr(out, body, depth + 1);
            out.push(')');
        }
        Expr::If {
            cond,
            then_branch,
            else_branch,
            ..
        } => {
            let _ = writeln!(out, "(if {cond}");
            write_expr(out, then_branch, depth + 1);
            out.push('\n');
            write_expr(out, else_branch, depth + 1);
            out.push(')');
        }
        Expr::Return { var, .. } => {
            let _ = write!(out, "(return {var})");
        }
    }
}

fn app_text(a: &App) -> String {
    match a {
        App::Const(c) => c.to_string(),
        App::Cons(x, y) => format!("(cons {x} {y})"),
        App::Car(x) => format!("(car {x})"),
        App::Cdr(x) => format!("(cdr {x})"),
        App::NullQ(x) => format!("(null? {x})"),
        App::Prim(op, x, y) => format!("({op} {x} {y})"),
        App::Call(f, args) => {
            let mut s = format!("({f}");
            for a in args {
                s.push(' ');
                s.push_str(a);
            }
            s.push(')');
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{assign_labels, parse_program};
    use proptest::prelude::*;

    fn canon(p: &Program) -> Program {
        // Compare modulo labels and spans: relabel from scratch and zero spans.
        let mut q = assign_labels(p);
        for d in &mut q.defs {
            d.span = Default::default();
            zero_spans(&mut d.body);
        }
        q
    }

    fn zero_spans(e: &mut Expr) {
        match e {
            Expr::Let { span, body, .. } => {
                *span = Default::default();
                zero_spans(body);
            }
            Expr::If {
                span,
                then_branch,
                else_branch,
                ..
            } => {
                *span = Default::default();
                zero_spans(then_branch);
                zero_spans(else_branch);
            }
            Expr::Return { span, .. } => *span = Default::default(),
        }
    }

    #[test]
    fn round_trips_the_length_example() {
        let src = "(define (length l)\
                     (let (x (null? l))\
                     (if x (let (v 0) (return v))\
                           (let (u (cdr l)) (let (y (length u)) (let (one 1) (let (z (+ y one)) (return z))))))))\
                   (define (main) (let (n nil) (let (w (length n)) (return w))))";
        let p = parse_program(src).unwrap();
        let text = pretty_print(&p);
        let q = parse_program(&text).unwrap();
        assert_eq!(canon(&p), canon(&q), "pretty output:\n{text}");
    }

    // Random well-formed programs: a single definition plus main calling it.
    // Exercises every expression and application constructor.
    fn arb_var() -> impl Strategy<Value = String> {
        prop_oneof![Just("a".to_string()), Just("b".to_string())]
    }

    fn arb_app(depth: u32) -> impl Strategy<Value = App> {
        let _ = depth;
        prop_oneof![
            any::<i64>().prop_map(|n| App::Const(crate::Const::Num(n))),
            Just(App::Const(crate::Const::Nil)),
            (arb_var(), arb_var()).prop_map(|(x, y)| App::Cons(x, y)),
            arb_var().prop_map(App::Car),
            arb_var().prop_map(App::Cdr),
            arb_var().prop_map(App::NullQ),
            (arb_var(), arb_var()).prop_map(|(x, y)| App::Prim(crate::PrimOp::Mul, x, y)),
            (arb_var(), arb_var())
                .prop_map(|(x, y)| App::Call("f".into(), vec![x, y])),
        ]
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = arb_var().prop_map(|var| Expr::Return {
            pi: 0,
            psi: 0,
            var,
            span: Default::default(),
        });
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (arb_var(), arb_app(0), inner.clone()).prop_map(|(var, rhs, body)| Expr::Let {
                    pi: 0,
                    var,
                    rhs,
                    body: Box::new(body),
                    span: Default::default(),
                }),
                (arb_var(), inner.clone(), inner).prop_map(|(cond, t, e)| Expr::If {
                    pi: 0,
                    psi: 0,
                    cond,
                    then_branch: Box::new(t),
                    else_branch: Box::new(e),
                    span: Default::default(),
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn round_trips_random_programs(body in arb_expr()) {
            let main_body = Expr::Let {
                pi: 0,
                var: "a".into(),
                rhs: App::Const(crate::Const::Num(1)),
                body: Box::new(Expr::Let {
                    pi: 0,
                    var: "r".into(),
                    rhs: App::Call("f".into(), vec!["a".into(), "a".into()]),
                    body: Box::new(Expr::Return {
                        pi: 0,
                        psi: 0,
                        var: "r".into(),
                        span: Default::default(),
                    }),
                    span: Default::default(),
                }),
                span: Default::default(),
            };
            let p = Program {
                defs: vec![
                    crate::FunDef {
                        name: "f".into(),
                        params: vec!["a".into(), "b".into()],
                        body,
                        span: Default::default(),
                    },
                    crate::FunDef {
                        name: "main".into(),
                        params: vec![],
                        body: main_body,
                        span: Default::default(),
                    },
                ],
            };
            let text = pretty_print(&p);
            let q = parse_program(&text).unwrap();
            prop_assert_eq!(canon(&p), canon(&q));
        }
    }
}

//! Program point and evaluation point labeling.
//!
//! Every expression node — let, if, and return alike — receives a program
//! point label `π`, numbered from 1 in textual order across the whole program
//! (definitions in source order, bodies in pre-order). Lets use their `π` as
//! the allocation-site identity of the closures they create; ifs and returns
//! use theirs as collection- and frame-site identities.
//!
//! If-conditions and returns additionally receive an evaluation point label
//! `ψ`, numbered from 1 in the same traversal. Evaluation points are where a
//! value's weak head normal form is actually demanded; the refinement that
//! narrows closure descriptors after a branch commits is keyed by them.

use crate::ast::{Expr, Program};

/// Assign `π` and `ψ` labels in textual order. Recomputes from scratch, so
/// the pass is idempotent and safe to rerun after any transformation.
pub fn assign_labels(p: &Program) -> Program {
    let mut out = p.clone();
    let mut next_pi = 1;
    let mut next_psi = 1;
    for d in &mut out.defs {
        label_expr(&mut d.body, &mut next_pi, &mut next_psi);
    }
    out
}

fn label_expr(e: &mut Expr, next_pi: &mut u32, next_psi: &mut u32) {
    match e {
        Expr::Let { pi, body, .. } => {
            *pi = *next_pi;
            *next_pi += 1;
            label_expr(body, next_pi, next_psi);
        }
        Expr::If {
            pi,
            psi,
            then_branch,
            else_branch,
            ..
        } => {
            *pi = *next_pi;
            *next_pi += 1;
            *psi = *next_psi;
            *next_psi += 1;
            label_expr(then_branch, next_pi, next_psi);
            label_expr(else_branch, next_pi, next_psi);
        }
        Expr::Return { pi, psi, .. } => {
            *pi = *next_pi;
            *next_pi += 1;
            *psi = *next_psi;
            *next_psi += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{parse_program, rename_distinct};

    use crate::fixtures::LENGTH_PROGRAM as LENGTH_SRC;

    #[test]
    fn labels_length_example_in_textual_order() {
        let p = assign_labels(&rename_distinct(&parse_program(LENGTH_SRC).unwrap()).unwrap());
        let length = p.find_def("length").unwrap();
        // Collect (π, brief description) in textual order.
        let mut seen = Vec::new();
        length.body.visit(&mut |e| {
            let tag = match e {
                Expr::Let { pi, var, .. } => (*pi, 0, format!("let {var}")),
                Expr::If { pi, psi, .. } => (*pi, *psi, "if".to_string()),
                Expr::Return { pi, psi, var, .. } => (*pi, *psi, format!("ret {var}")),
            };
            seen.push(tag);
        });
        let got: Vec<(u32, u32, &str)> = seen
            .iter()
            .map(|(a, b, s)| (*a, *b, s.as_str()))
            .collect();
        assert_eq!(
            got,
            vec![
                (1, 0, "let x"),
                (2, 1, "if"),
                (3, 0, "let v"),
                (4, 2, "ret v"),
                (5, 0, "let u"),
                (6, 0, "let y"),
                (7, 0, "let one"),
                (8, 0, "let z"),
                (9, 3, "ret z"),
            ]
        );
        // main continues the program-global counters.
        let main = p.main_def();
        assert_eq!(main.body.pi(), 10);
        let mut max_pi = 0;
        let mut max_psi = 0;
        for d in &p.defs {
            d.body.visit(&mut |e| {
                max_pi = max_pi.max(e.pi());
                if let Expr::If { psi, .. } | Expr::Return { psi, .. } = e {
                    max_psi = max_psi.max(*psi);
                }
            });
        }
        // 9 nodes in length, 8 in main, 10 in build.
        assert_eq!(max_pi, 27);
        // ψ: length's if + 2 returns, main's return, build's if + 2 returns.
        assert_eq!(max_psi, 7);
    }

    #[test]
    fn labeling_is_idempotent() {
        let p = rename_distinct(&parse_program(LENGTH_SRC).unwrap()).unwrap();
        let once = assign_labels(&p);
        let twice = assign_labels(&once);
        assert_eq!(once, twice);
    }
}

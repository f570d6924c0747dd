//! Reference programs shared by tests across the workspace.
//!
//! These are ordinary source texts; nothing here is wired into the library
//! itself. They live in the library (rather than per-crate test code) so the
//! analysis, runtime, and CLI crates can all assert against the same
//! programs.

/// List-length over a freshly built list.
///
/// `length` walks a list without using the elements, `build` constructs
/// `(n n-1 ... 1)` eagerly-shaped but lazily evaluated, and `main` measures a
/// 20-element list after adding 1 to an unrelated dead computation `(build k)`
/// result — making `a`'s structure dead while `c`'s spine is live. This is
/// the standard worked example for the liveness analysis: compare the derived
/// demand transformer for `length`'s parameter and the per-variable liveness
/// roots against hand-derived values.
pub const LENGTH_PROGRAM: &str = "\
(define (length l)
  (let (x (null? l))
    (if x
        (let (v 0)
          (return v))
        (let (u (cdr l))
          (let (y (length u))
            (let (one 1)
              (let (z (+ y one))
                (return z))))))))

(define (main)
  (let (k 20)
    (let (a (build k))
      (let (one 1)
        (let (b (+ a one))
          (let (n nil)
            (let (c (cons b n))
              (let (w (length c))
                (return w)))))))))

(define (build n)
  (let (zero 0)
    (let (stop (< n zero))
      (if stop
          (let (e nil)
            (return e))
          (let (m1 1)
            (let (n2 (- n m1))
              (let (rest (build n2))
                (let (cell (cons n rest))
                  (return cell)))))))))
";

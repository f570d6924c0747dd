//! Core abstract syntax.
//!
//! Variables are plain strings; after [`crate::rename_distinct`] every binder
//! is unique program-wide, so a name identifies a binding without scope
//! bookkeeping. Labels are `0` (unassigned) until [`crate::assign_labels`]
//! numbers them starting from `1`.

/// Program point label, assigned to every expression node in textual order.
pub type Pi = u32;

/// Evaluation point label, assigned to every if-condition and return in
/// textual order.
pub type Psi = u32;

/// Source position (1-based line and column) for diagnostics. Zeroed on
/// synthesized nodes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

/// Constant right-hand sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Const {
    Num(i64),
    Nil,
}

impl std::fmt::Display for Const {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Const::Num(n) => write!(f, "{n}"),
            Const::Nil => write!(f, "nil"),
        }
    }
}

/// Binary primitive operators. Comparisons return `0`/`1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrimOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Eq,
}

impl PrimOp {
    pub fn symbol(self) -> &'static str {
        match self {
            PrimOp::Add => "+",
            PrimOp::Sub => "-",
            PrimOp::Mul => "*",
            PrimOp::Div => "/",
            PrimOp::Lt => "<",
            PrimOp::Eq => "=",
        }
    }
}

impl std::fmt::Display for PrimOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Applications: the only right-hand sides a `let` may bind. All operands are
/// variables (administrative normal form).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum App {
    Const(Const),
    Cons(String, String),
    Car(String),
    Cdr(String),
    NullQ(String),
    Prim(PrimOp, String, String),
    Call(String, Vec<String>),
}

impl App {
    /// Free variables in first-occurrence order, deduplicated. This order is
    /// load-bearing: closure environments and their liveness descriptors are
    /// built in it.
    pub fn free_vars(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for v in self.operands() {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    /// All operand occurrences in positional order, including repeats.
    pub fn operands(&self) -> Vec<&str> {
        match self {
            App::Const(_) => vec![],
            App::Cons(a, b) | App::Prim(_, a, b) => vec![a, b],
            App::Car(a) | App::Cdr(a) | App::NullQ(a) => vec![a],
            App::Call(_, args) => args.iter().map(|s| s.as_str()).collect(),
        }
    }
}

/// Expressions. Every node carries a program point label `pi`; ifs and
/// returns additionally carry an evaluation point label `psi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Let {
        pi: Pi,
        var: String,
        rhs: App,
        body: Box<Expr>,
        span: Span,
    },
    If {
        pi: Pi,
        psi: Psi,
        cond: String,
        then_branch: Box<Expr>,
        else_branch: Box<Expr>,
        span: Span,
    },
    Return {
        pi: Pi,
        psi: Psi,
        var: String,
        span: Span,
    },
}

impl Expr {
    pub fn pi(&self) -> Pi {
        match self {
            Expr::Let { pi, .. } | Expr::If { pi, .. } | Expr::Return { pi, .. } => *pi,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Expr::Let { span, .. } | Expr::If { span, .. } | Expr::Return { span, .. } => *span,
        }
    }

    /// Number of `let` nodes in this subtree — the exact number of heap cells
    /// the machine allocates while evaluating the subtree's own code (calls
    /// and forced closures allocate under their own labels).
    pub fn let_count(&self) -> u32 {
        match self {
            Expr::Let { body, .. } => 1 + body.let_count(),
            Expr::If {
                then_branch,
                else_branch,
                ..
            } => then_branch.let_count().max(else_branch.let_count()),
            Expr::Return { .. } => 0,
        }
    }

    /// Visit every node of the subtree in textual (pre-)order.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Let { body, .. } => body.visit(f),
            Expr::If {
                then_branch,
                else_branch,
                ..
            } => {
                then_branch.visit(f);
                else_branch.visit(f);
            }
            Expr::Return { .. } => {}
        }
    }
}

/// A function definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: Expr,
    pub span: Span,
}

/// A whole program: definitions in source order, one of which is the
/// nullary entry point `main`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub defs: Vec<FunDef>,
}

impl Program {
    /// Name of the entry point.
    pub const MAIN: &'static str = "main";

    pub fn find_def(&self, name: &str) -> Option<&FunDef> {
        self.defs.iter().find(|d| d.name == name)
    }

    /// The entry point. Parsing guarantees it exists and is nullary.
    pub fn main_def(&self) -> &FunDef {
        self.find_def(Self::MAIN)
            .expect("parser guarantees a main definition")
    }
}

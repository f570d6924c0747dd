//! S-expression parser and structural validation.
//!
//! Parsing is two layers: a lexer producing parenthesis/atom tokens with
//! source positions, and a recursive-descent reader mapping token trees onto
//! the fixed program grammar. There is deliberately no generic s-expression
//! data stage — the grammar is small and flat, and reading it directly gives
//! precise error positions ("expected a variable, got `7`" at the offending
//! token) instead of a shape mismatch discovered later.
//!
//! After reading, [`parse_program`] validates structure:
//!
//! * `main` exists and takes no parameters;
//! * function names are unique and don't collide with built-in forms;
//! * parameter lists have no duplicates;
//! * every call names a defined function with matching arity.
//!
//! Variable *scoping* is not checked here; [`crate::rename_distinct`] resolves
//! scopes and reports unbound variables.

use crate::ast::{App, Const, Expr, FunDef, PrimOp, Program, Span};
use crate::LangError;

/// Names that introduce syntax and therefore cannot name user functions.
const RESERVED: &[&str] = &[
    "define", "let", "if", "return", "cons", "car", "cdr", "null?", "nil", "+", "-", "*", "/",
    "<", "=",
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Atom(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

fn lex(text: &str) -> Result<Vec<Token>, LangError> {
    let mut out = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let span = Span { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                // Comment to end of line.
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                chars.next();
                col += 1;
                out.push(Token {
                    tok: Tok::LParen,
                    span,
                });
            }
            ')' => {
                chars.next();
                col += 1;
                out.push(Token {
                    tok: Tok::RParen,
                    span,
                });
            }
            _ => {
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    atom.push(c);
                    chars.next();
                    col += 1;
                }
                out.push(Token {
                    tok: Tok::Atom(atom),
                    span,
                });
            }
        }
    }
    Ok(out)
}

struct Reader {
    toks: Vec<Token>,
    pos: usize,
}

impl Reader {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eof_span(&self) -> Span {
        self.toks.last().map(|t| t.span).unwrap_or_default()
    }

    fn expect_lparen(&mut self, what: &str) -> Result<Span, LangError> {
        match self.next() {
            Some(Token {
                tok: Tok::LParen,
                span,
            }) => Ok(span),
            Some(t) => Err(LangError::parse(
                t.span,
                format!("expected `(` to open {what}, got {}", describe(&t.tok)),
            )),
            None => Err(LangError::parse(
                self.eof_span(),
                format!("unexpected end of input, expected {what}"),
            )),
        }
    }

    fn expect_rparen(&mut self, what: &str) -> Result<(), LangError> {
        match self.next() {
            Some(Token {
                tok: Tok::RParen, ..
            }) => Ok(()),
            Some(t) => Err(LangError::parse(
                t.span,
                format!("expected `)` to close {what}, got {}", describe(&t.tok)),
            )),
            None => Err(LangError::parse(
                self.eof_span(),
                format!("unexpected end of input, expected `)` to close {what}"),
            )),
        }
    }

    fn expect_atom(&mut self, what: &str) -> Result<(String, Span), LangError> {
        match self.next() {
            Some(Token {
                tok: Tok::Atom(a),
                span,
            }) => Ok((a, span)),
            Some(t) => Err(LangError::parse(
                t.span,
                format!("expected {what}, got {}", describe(&t.tok)),
            )),
            None => Err(LangError::parse(
                self.eof_span(),
                format!("unexpected end of input, expected {what}"),
            )),
        }
    }

    /// An atom that must be a variable: not an integer literal, not `nil`,
    /// not a reserved word.
    fn expect_var(&mut self, what: &str) -> Result<(String, Span), LangError> {
        let (a, span) = self.expect_atom(what)?;
        if parse_int(&a).is_some() {
            return Err(LangError::parse(
                span,
                format!("expected {what}, got the literal `{a}` (operands must be variables; bind the literal with a let first)"),
            ));
        }
        if a == "nil" {
            return Err(LangError::parse(
                span,
                format!("expected {what}, got `nil` (operands must be variables; bind nil with a let first)"),
            ));
        }
        if RESERVED.contains(&a.as_str()) {
            return Err(LangError::parse(
                span,
                format!("expected {what}, got the reserved word `{a}`"),
            ));
        }
        Ok((a, span))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Atom(a) => format!("`{a}`"),
    }
}

fn parse_int(s: &str) -> Option<i64> {
    // Accept an optional sign followed by digits; reject a lone "-" so that
    // the subtraction operator lexes as an operator, not a number.
    let body = s.strip_prefix('-').unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse::<i64>().ok()
}

/// Parse source text into a [`Program`], validating structure (see module
/// docs). Labels are left unassigned; run the result through
/// [`crate::rename_distinct`] and [`crate::assign_labels`] before analysis or
/// execution.
pub fn parse_program(text: &str) -> Result<Program, LangError> {
    let toks = lex(text)?;
    let mut r = Reader { toks, pos: 0 };
    let mut defs = Vec::new();
    while r.peek().is_some() {
        defs.push(parse_def(&mut r)?);
    }
    if defs.is_empty() {
        return Err(LangError::Invalid("program has no definitions".into()));
    }
    let program = Program { defs };
    validate(&program)?;
    Ok(program)
}

fn parse_def(r: &mut Reader) -> Result<FunDef, LangError> {
    let span = r.expect_lparen("a definition")?;
    let (kw, kw_span) = r.expect_atom("`define`")?;
    if kw != "define" {
        return Err(LangError::parse(
            kw_span,
            format!("expected `define`, got `{kw}`"),
        ));
    }
    r.expect_lparen("the function header")?;
    let (name, name_span) = r.expect_atom("a function name")?;
    if RESERVED.contains(&name.as_str()) {
        return Err(LangError::parse(
            name_span,
            format!("`{name}` is a reserved word and cannot name a function"),
        ));
    }
    if parse_int(&name).is_some() {
        return Err(LangError::parse(
            name_span,
            format!("`{name}` is a number and cannot name a function"),
        ));
    }
    let mut params = Vec::new();
    loop {
        match r.peek() {
            Some(Token {
                tok: Tok::RParen, ..
            }) => {
                r.next();
                break;
            }
            Some(_) => {
                let (p, _) = r.expect_var("a parameter name")?;
                params.push(p);
            }
            None => {
                return Err(LangError::parse(
                    r.eof_span(),
                    "unexpected end of input in function header",
                ))
            }
        }
    }
    let body = parse_expr(r)?;
    r.expect_rparen("the definition")?;
    Ok(FunDef {
        name,
        params,
        body,
        span,
    })
}

fn parse_expr(r: &mut Reader) -> Result<Expr, LangError> {
    let span = r.expect_lparen("an expression")?;
    let (head, head_span) = r.expect_atom("`let`, `if`, or `return`")?;
    match head.as_str() {
        "let" => {
            r.expect_lparen("the let binding")?;
            let (var, _) = r.expect_var("a variable to bind")?;
            let rhs = parse_app(r)?;
            r.expect_rparen("the let binding")?;
            let body = parse_expr(r)?;
            r.expect_rparen("the let")?;
            Ok(Expr::Let {
                pi: 0,
                var,
                rhs,
                body: Box::new(body),
                span,
            })
        }
        "if" => {
            let (cond, _) = r.expect_var("the if condition variable")?;
            let then_branch = parse_expr(r)?;
            let else_branch = parse_expr(r)?;
            r.expect_rparen("the if")?;
            Ok(Expr::If {
                pi: 0,
                psi: 0,
                cond,
                then_branch: Box::new(then_branch),
                else_branch: Box::new(else_branch),
                span,
            })
        }
        "return" => {
            let (var, _) = r.expect_var("the return variable")?;
            r.expect_rparen("the return")?;
            Ok(Expr::Return {
                pi: 0,
                psi: 0,
                var,
                span,
            })
        }
        other => Err(LangError::parse(
            head_span,
            format!("expected `let`, `if`, or `return`, got `{other}`"),
        )),
    }
}

/// An application: the right-hand side of a let binding.
fn parse_app(r: &mut Reader) -> Result<App, LangError> {
    match r.peek().cloned() {
        Some(Token {
            tok: Tok::Atom(a),
            span,
        }) => {
            r.next();
            if let Some(n) = parse_int(&a) {
                return Ok(App::Const(Const::Num(n)));
            }
            if a == "nil" {
                return Ok(App::Const(Const::Nil));
            }
            Err(LangError::parse(
                span,
                format!(
                    "a let right-hand side must be a constant or an application, got the bare variable `{a}`"
                ),
            ))
        }
        Some(Token {
            tok: Tok::LParen, ..
        }) => {
            r.next();
            let (op, op_span) = r.expect_atom("an operator or function name")?;
            let app = match op.as_str() {
                "cons" => {
                    let (a, _) = r.expect_var("the first cons operand")?;
                    let (b, _) = r.expect_var("the second cons operand")?;
                    App::Cons(a, b)
                }
                "car" => App::Car(r.expect_var("the car operand")?.0),
                "cdr" => App::Cdr(r.expect_var("the cdr operand")?.0),
                "null?" => App::NullQ(r.expect_var("the null? operand")?.0),
                "+" | "-" | "*" | "/" | "<" | "=" => {
                    let p = match op.as_str() {
                        "+" => PrimOp::Add,
                        "-" => PrimOp::Sub,
                        "*" => PrimOp::Mul,
                        "/" => PrimOp::Div,
                        "<" => PrimOp::Lt,
                        _ => PrimOp::Eq,
                    };
                    let (a, _) = r.expect_var("the first operand")?;
                    let (b, _) = r.expect_var("the second operand")?;
                    App::Prim(p, a, b)
                }
                name => {
                    if RESERVED.contains(&name) {
                        return Err(LangError::parse(
                            op_span,
                            format!("`{name}` cannot be called as a function here"),
                        ));
                    }
                    if parse_int(name).is_some() {
                        return Err(LangError::parse(
                            op_span,
                            format!("`{name}` is a number, not a function"),
                        ));
                    }
                    let mut args = Vec::new();
                    while let Some(t) = r.peek() {
                        if t.tok == Tok::RParen {
                            break;
                        }
                        args.push(r.expect_var("a call argument")?.0);
                    }
                    App::Call(name.to_string(), args)
                }
            };
            r.expect_rparen("the application")?;
            Ok(app)
        }
        Some(t) => Err(LangError::parse(
            t.span,
            "expected a let right-hand side (constant or application)",
        )),
        None => Err(LangError::parse(
            r.eof_span(),
            "unexpected end of input in let binding",
        )),
    }
}

fn validate(p: &Program) -> Result<(), LangError> {
    // Unique definition names.
    for (i, d) in p.defs.iter().enumerate() {
        if p.defs[..i].iter().any(|e| e.name == d.name) {
            return Err(LangError::Invalid(format!(
                "function `{}` is defined more than once",
                d.name
            )));
        }
    }
    // main exists and is nullary.
    match p.find_def(Program::MAIN) {
        None => {
            return Err(LangError::Invalid(
                "program has no `main` definition".into(),
            ))
        }
        Some(m) if !m.params.is_empty() => {
            return Err(LangError::Invalid(format!(
                "`main` must take no parameters, but takes {}",
                m.params.len()
            )))
        }
        Some(_) => {}
    }
    // Parameter lists have no duplicates.
    for d in &p.defs {
        for (i, q) in d.params.iter().enumerate() {
            if d.params[..i].contains(q) {
                return Err(LangError::Invalid(format!(
                    "function `{}` has duplicate parameter `{q}`",
                    d.name
                )));
            }
        }
    }
    // Calls name defined functions with matching arity; main is not callable
    // (it is the entry point, not a function value).
    for d in &p.defs {
        let mut err = None;
        d.body.visit(&mut |e| {
            if err.is_some() {
                return;
            }
            if let Expr::Let {
                rhs: App::Call(f, args),
                span,
                ..
            } = e
            {
                match p.find_def(f) {
                    None => {
                        err = Some(LangError::parse(
                            *span,
                            format!("call to undefined function `{f}`"),
                        ));
                    }
                    Some(_) if f == Program::MAIN => {
                        err = Some(LangError::parse(*span, "`main` cannot be called"));
                    }
                    Some(callee) => {
                        if callee.params.len() != args.len() {
                            err = Some(LangError::parse(
                                *span,
                                format!(
                                    "`{f}` takes {} argument(s) but is called with {}",
                                    callee.params.len(),
                                    args.len()
                                ),
                            ));
                        }
                    }
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(())
}

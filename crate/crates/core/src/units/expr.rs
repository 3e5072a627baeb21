//! Attribute-value expressions and their kind checking.
//!
//! Operators fold through [`check_op`], so an expression is well typed exactly
//! when every sub-expression has a ledger verdict of `Allowed`.

use std::collections::BTreeMap;

use super::kind::{KindRegistry, QuantityKind};
use super::ledger::{check_op, ForbidReason, Operator, Verdict};
use crate::diag::{Diagnostic, SourceSpan};

/// Column range `[start, end)` within a one-line expression, 0-based bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExprSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Number(String),
    Name(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: ExprSpan,
}

/// Free names and callable conversions visible to an expression.
#[derive(Debug, Clone, Default)]
pub struct TypeEnv {
    pub vars: BTreeMap<String, QuantityKind>,
    /// name -> (from, to)
    pub functions: BTreeMap<String, (QuantityKind, QuantityKind)>,
}

impl TypeEnv {
    pub fn with_var(mut self, name: &str, kind: QuantityKind) -> Self {
        self.vars.insert(name.to_string(), kind);
        self
    }
}

const EXPR_FILE: &str = "<expr>";

fn span_of(s: ExprSpan) -> SourceSpan {
    SourceSpan::new(EXPR_FILE, (1, s.start as u32 + 1), (1, s.end.max(s.start) as u32 + 1))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(&'static str),
}

fn lex(text: &str) -> Result<Vec<(Tok, ExprSpan)>, Diagnostic> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || (c == b'.' && b.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            out.push((Tok::Num(text[start..i].to_string()), ExprSpan { start, end: i }));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'.') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), ExprSpan { start, end: i }));
            continue;
        }
        let two = text.get(i..i + 2).unwrap_or("");
        let sym: &'static str = match two {
            "<=" => "<=",
            ">=" => ">=",
            "==" => "==",
            _ => match c {
                b'+' => "+",
                b'-' => "-",
                b'*' => "*",
                b'/' => "/",
                b'(' => "(",
                b')' => ")",
                b',' => ",",
                b'<' => "<",
                b'>' => ">",
                _ => {
                    let ch = text[i..].chars().next().unwrap_or('?');
                    return Err(Diagnostic::error(
                        "E205",
                        format!("unexpected character `{ch}` in expression"),
                        span_of(ExprSpan { start: i, end: i + ch.len_utf8() }),
                    ));
                }
            },
        };
        i += sym.len();
        out.push((Tok::Sym(sym), ExprSpan { start, end: i }));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, ExprSpan)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek_sym(&self) -> Option<&'static str> {
        match self.toks.get(self.pos) {
            Some((Tok::Sym(s), _)) => Some(s),
            _ => None,
        }
    }

    fn err(&self, msg: &str) -> Diagnostic {
        let span = self.toks.get(self.pos).map(|t| t.1).unwrap_or(ExprSpan { start: self.len, end: self.len });
        Diagnostic::error("E205", msg.to_string(), span_of(span))
    }

    fn expect(&mut self, sym: &str) -> Result<ExprSpan, Diagnostic> {
        match self.toks.get(self.pos) {
            Some((Tok::Sym(s), sp)) if *s == sym => {
                let sp = *sp;
                self.pos += 1;
                Ok(sp)
            }
            _ => Err(self.err(&format!("expected `{sym}`"))),
        }
    }

    fn expr(&mut self) -> Result<Expr, Diagnostic> {
        let lhs = self.sum()?;
        let op = match self.peek_sym() {
            Some("<") => BinOp::Lt,
            Some("<=") => BinOp::Le,
            Some("==") => BinOp::Eq,
            Some(">=") => BinOp::Ge,
            Some(">") => BinOp::Gt,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.sum()?;
        Ok(binary(op, lhs, rhs))
    }

    fn sum(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek_sym() {
                Some("+") => BinOp::Add,
                Some("-") => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.product()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn product(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek_sym() {
                Some("*") => BinOp::Mul,
                Some("/") => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, Diagnostic> {
        if self.peek_sym() == Some("-") {
            let start = self.toks[self.pos].1.start;
            self.pos += 1;
            let e = self.unary()?;
            let span = ExprSpan { start, end: e.span.end };
            return Ok(Expr { kind: ExprKind::Neg(Box::new(e)), span });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, Diagnostic> {
        let Some((tok, span)) = self.toks.get(self.pos).cloned() else {
            return Err(self.err("unexpected end of expression"));
        };
        self.pos += 1;
        match tok {
            Tok::Num(n) => Ok(Expr { kind: ExprKind::Number(n), span }),
            Tok::Ident(name) => {
                if self.peek_sym() == Some("(") {
                    self.pos += 1;
                    let mut args = Vec::new();
                    if self.peek_sym() != Some(")") {
                        loop {
                            args.push(self.expr()?);
                            if self.peek_sym() == Some(",") {
                                self.pos += 1;
                            } else {
                                break;
                            }
                        }
                    }
                    let close = self.expect(")")?;
                    Ok(Expr { kind: ExprKind::Call(name, args), span: ExprSpan { start: span.start, end: close.end } })
                } else {
                    Ok(Expr { kind: ExprKind::Name(name), span })
                }
            }
            Tok::Sym("(") => {
                let e = self.expr()?;
                let close = self.expect(")")?;
                Ok(Expr { span: ExprSpan { start: span.start, end: close.end }, ..e })
            }
            Tok::Sym(_) => {
                self.pos -= 1;
                Err(self.err("expected a value"))
            }
        }
    }
}

fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    let span = ExprSpan { start: lhs.span.start, end: rhs.span.end };
    Expr { kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span }
}

pub fn parse_expr(text: &str) -> Result<Expr, Diagnostic> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, len: text.len() };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input after expression"));
    }
    Ok(e)
}

fn forbidden(op: Operator, reason: ForbidReason, lhs: &QuantityKind, rhs: &QuantityKind, span: ExprSpan) -> Diagnostic {
    Diagnostic::error(
        reason.code(),
        format!("`{}` on {} and {}: {}", op.symbol(), lhs.name, rhs.name, reason),
        span_of(span),
    )
}

fn apply(reg: &KindRegistry, op: Operator, lhs: &QuantityKind, rhs: &QuantityKind, span: ExprSpan) -> Result<QuantityKind, Diagnostic> {
    match check_op(reg, op, lhs, rhs) {
        Ok(Verdict::Allowed { result, .. }) => Ok(result),
        Ok(Verdict::Forbidden(reason)) => Err(forbidden(op, reason, lhs, rhs, span)),
        Err(e) => Err(Diagnostic::error("E203", e.to_string(), span_of(span))),
    }
}

/// Folds the operator ledger over `expr`, returning the result kind or the
/// first offending sub-expression.
pub fn typecheck_expr(reg: &KindRegistry, expr: &Expr, env: &TypeEnv) -> Result<QuantityKind, Diagnostic> {
    match &expr.kind {
        ExprKind::Number(_) => Ok(reg.real()),
        ExprKind::Name(n) => env
            .vars
            .get(n)
            .cloned()
            .ok_or_else(|| Diagnostic::error("E203", format!("unknown name `{n}`"), span_of(expr.span))),
        ExprKind::Neg(e) => {
            let k = typecheck_expr(reg, e, env)?;
            apply(reg, Operator::ScaleByReal, &k, &reg.real(), expr.span)
        }
        ExprKind::Binary(op, a, b) => {
            let lk = typecheck_expr(reg, a, env)?;
            let rk = typecheck_expr(reg, b, env)?;
            let op = match op {
                BinOp::Add => Operator::Add,
                BinOp::Sub => Operator::Sub,
                BinOp::Mul => Operator::Mul,
                BinOp::Div => Operator::Div,
                _ => Operator::Compare,
            };
            apply(reg, op, &lk, &rk, expr.span)
        }
        ExprKind::Call(f, args) => {
            let kinds = args.iter().map(|a| typecheck_expr(reg, a, env)).collect::<Result<Vec<_>, _>>()?;
            match f.as_str() {
                "mean" => {
                    let (first, rest) = kinds
                        .split_first()
                        .ok_or_else(|| Diagnostic::error("E205", "mean needs at least one argument", span_of(expr.span)))?;
                    let mut result = apply(reg, Operator::Mean, first, first, expr.span)?;
                    for k in rest {
                        result = apply(reg, Operator::Mean, first, k, expr.span)?;
                    }
                    Ok(result)
                }
                "rate" => match kinds.as_slice() {
                    [d, t] => apply(reg, Operator::RateOfChange, d, t, expr.span),
                    _ => Err(Diagnostic::error("E205", "rate takes two arguments", span_of(expr.span))),
                },
                name => {
                    let (from, to) = env
                        .functions
                        .get(name)
                        .ok_or_else(|| Diagnostic::error("E203", format!("unknown function `{name}`"), span_of(expr.span)))?;
                    match kinds.as_slice() {
                        [k] if k == from => Ok(to.clone()),
                        [k] => Err(Diagnostic::error(
                            "E202",
                            format!("`{name}` expects {} but got {}", from.name, k.name),
                            span_of(args[0].span),
                        )),
                        _ => Err(Diagnostic::error("E205", format!("`{name}` takes one argument"), span_of(expr.span))),
                    }
                }
            }
        }
    }
}

/// Parses then checks `text` in one go.
pub fn typecheck_str(reg: &KindRegistry, text: &str, env: &TypeEnv) -> Result<QuantityKind, Diagnostic> {
    typecheck_expr(reg, &parse_expr(text)?, env)
}

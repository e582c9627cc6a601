//! A small real-valued expression language with exact partial derivatives.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := primary ('^' exponent)?
//! exponent := '-' exponent | power
//! primary  := number | x1 | x2 | ... | s | t | pi | func '(' expr ')' | '(' expr ')'
//! func     := sin | cos | exp | tanh
//! ```
//!
//! `s` and `t` are aliases of `x1` and `x2`. Exponents must be constant integers, and
//! `^` is right-associative.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::error::{Error, Result};

const MAX_DEPTH: usize = 200;
const MAX_TOKENS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Tanh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Tanh => "tanh",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
            Func::Tanh => x.tanh(),
        }
    }
}

/// Expression tree. `Var(i)` is the coordinate `x{i+1}`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: found {found}, expected one of {}", expected.join(", "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("invalid exponent at byte {offset}: {reason}")]
    Exponent { offset: usize, reason: String },
    #[error("invalid number `{text}` at byte {offset}")]
    Number { text: String, offset: usize },
    #[error("expression nested deeper than {MAX_DEPTH} levels at byte {offset}")]
    TooDeep { offset: usize },
    #[error("expression longer than {MAX_TOKENS} tokens")]
    TooLong,
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::Exponent { offset, .. }
            | ParseError::Number { offset, .. }
            | ParseError::TooDeep { offset } => *offset,
            ParseError::TooLong => 0,
        }
    }
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Config(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(u8),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{}`", *c as char),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> std::result::Result<Vec<(Tok, usize)>, ParseError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                if j < b.len() && b[j].is_ascii_digit() {
                    i = j;
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            match text.parse::<f64>() {
                Ok(v) if v.is_finite() => out.push((Tok::Num(v), start)),
                _ => {
                    return Err(ParseError::Number {
                        text: text.into(),
                        offset: start,
                    })
                }
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].into()), start));
        } else if b"+-*/^()".contains(&c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap();
            return Err(ParseError::Syntax {
                offset: i,
                found: format!("`{ch}`"),
                expected: vec!["number".into(), "identifier".into(), "operator".into()],
            });
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
}

const PRIMARY_START: [&str; 5] = ["number", "variable", "function", "`(`", "`-`"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            found: self.peek().describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn enter(&mut self) -> std::result::Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::TooDeep {
                offset: self.offset(),
            });
        }
        Ok(())
    }

    fn expr(&mut self) -> std::result::Result<Expr, ParseError> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym(b'+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym(b'-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> std::result::Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym(b'*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Sym(b'/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> std::result::Result<Expr, ParseError> {
        if self.peek() == &Tok::Sym(b'-') {
            self.bump();
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> std::result::Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek() != &Tok::Sym(b'^') {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        self.enter()?;
        let exponent = self.exponent()?;
        self.depth -= 1;
        match exponent.constant_value() {
            None => Err(ParseError::Exponent {
                offset: at,
                reason: "exponent must not depend on variables".into(),
            }),
            Some(k) if k.fract() != 0.0 || !k.is_finite() || k.abs() > 1024.0 => {
                Err(ParseError::Exponent {
                    offset: at,
                    reason: format!("exponent {k} is not an integer in [-1024, 1024]"),
                })
            }
            Some(_) => Ok(Expr::Pow(Box::new(base), Box::new(exponent))),
        }
    }

    fn exponent(&mut self) -> std::result::Result<Expr, ParseError> {
        if self.peek() == &Tok::Sym(b'-') {
            self.bump();
            self.enter()?;
            let inner = self.exponent()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn primary(&mut self) -> std::result::Result<Expr, ParseError> {
        let (tok, at) = (self.peek().clone(), self.offset());
        if !matches!(tok, Tok::Num(_) | Tok::Ident(_) | Tok::Sym(b'(')) {
            return Err(self.error(&PRIMARY_START));
        }
        self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Sym(b'(') => {
                let inner = self.expr()?;
                self.close()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(f) = Func::from_name(&name) {
                    if self.peek() != &Tok::Sym(b'(') {
                        return Err(self.error(&["`(`"]));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.close()?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                match name.as_str() {
                    "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                    "s" => Ok(Expr::Var(0)),
                    "t" => Ok(Expr::Var(1)),
                    _ => match name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                        Some(i) if i >= 1 && !name[1..].starts_with('0') => Ok(Expr::Var(i - 1)),
                        _ => Err(ParseError::UnknownIdentifier { name, offset: at }),
                    },
                }
            }
            _ => unreachable!(),
        }
    }

    fn close(&mut self) -> std::result::Result<(), ParseError> {
        if self.peek() == &Tok::Sym(b')') {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&["`)`", "operator"]))
        }
    }
}

/// Parses `src` into an expression tree.
pub fn parse(src: &str) -> std::result::Result<Expr, ParseError> {
    let toks = lex(src)?;
    if toks.len() > MAX_TOKENS {
        return Err(ParseError::TooLong);
    }
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    if p.peek() != &Tok::End {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(e)
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        parse(s)
    }
}

// Printing precedence levels.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const ATOM: u8 = 5;

impl Expr {
    fn level(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => SUM,
            Expr::Mul(..) | Expr::Div(..) => PRODUCT,
            Expr::Neg(..) => UNARY,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => ATOM,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.write_at(f, UNARY)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write_at(f, SUM)?;
                write!(
                    f,
                    " {} ",
                    if matches!(self, Expr::Add(..)) {
                        '+'
                    } else {
                        '-'
                    }
                )?;
                b.write_at(f, PRODUCT)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.write_at(f, PRODUCT)?;
                write!(
                    f,
                    "{}",
                    if matches!(self, Expr::Mul(..)) {
                        '*'
                    } else {
                        '/'
                    }
                )?;
                b.write_at(f, UNARY)
            }
            Expr::Pow(a, b) => {
                a.write_at(f, ATOM)?;
                write!(f, "^")?;
                b.write_at(f, UNARY)
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write_at(f, 0)?;
                write!(f, ")")
            }
        }
    }

    /// Number of coordinates the expression reads (one more than the largest index).
    pub fn arity(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Call(_, a) => a.arity(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.arity().max(b.arity()),
        }
    }

    /// The value of a variable-free expression, if it evaluates cleanly.
    pub fn constant_value(&self) -> Option<f64> {
        if self.arity() > 0 {
            return None;
        }
        self.eval(&[]).ok()
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 0.0)
    }

    /// Evaluates at `point`; `point[i]` is the value of `x{i+1}`.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => *point.get(*i).ok_or_else(|| {
                Error::Eval(format!(
                    "variable x{} needs a point of dimension {}, got {}",
                    i + 1,
                    i + 1,
                    point.len()
                ))
            })?,
            Expr::Neg(a) => -a.eval(point)?,
            Expr::Add(a, b) => a.eval(point)? + b.eval(point)?,
            Expr::Sub(a, b) => a.eval(point)? - b.eval(point)?,
            Expr::Mul(a, b) => a.eval(point)? * b.eval(point)?,
            Expr::Div(a, b) => {
                let d = b.eval(point)?;
                if d == 0.0 {
                    return Err(Error::Eval(format!("division by zero in `{self}`")));
                }
                a.eval(point)? / d
            }
            Expr::Pow(a, b) => {
                let base = a.eval(point)?;
                let k = b.eval(point)? as i32;
                if base == 0.0 && k < 0 {
                    return Err(Error::Eval(format!("division by zero in `{self}`")));
                }
                base.powi(k)
            }
            Expr::Call(func, a) => func.apply(a.eval(point)?),
        })
    }

    /// Exact partial derivative with respect to `Var(var)`.
    pub fn differentiate(&self, var: usize) -> Expr {
        match self {
            Expr::Num(_) => num(0.0),
            Expr::Var(i) => num(if *i == var { 1.0 } else { 0.0 }),
            Expr::Neg(a) => neg(a.differentiate(var)),
            Expr::Add(a, b) => add(a.differentiate(var), b.differentiate(var)),
            Expr::Sub(a, b) => sub(a.differentiate(var), b.differentiate(var)),
            Expr::Mul(a, b) => add(
                mul(a.differentiate(var), (**b).clone()),
                mul((**a).clone(), b.differentiate(var)),
            ),
            Expr::Div(a, b) => div(
                sub(
                    mul(a.differentiate(var), (**b).clone()),
                    mul((**a).clone(), b.differentiate(var)),
                ),
                pow((**b).clone(), 2),
            ),
            Expr::Pow(a, b) => {
                let k = b.constant_value().unwrap_or(0.0) as i32;
                mul(
                    mul(num(k as f64), pow((**a).clone(), k - 1)),
                    a.differentiate(var),
                )
            }
            Expr::Call(func, a) => {
                let inner = (**a).clone();
                let outer = match func {
                    Func::Sin => call(Func::Cos, inner),
                    Func::Cos => neg(call(Func::Sin, inner)),
                    Func::Exp => call(Func::Exp, inner),
                    Func::Tanh => sub(num(1.0), pow(call(Func::Tanh, inner), 2)),
                };
                mul(outer, a.differentiate(var))
            }
        }
    }

    /// Replaces each `Var(i)` by `subs[i]`.
    pub fn substitute(&self, subs: &[Expr]) -> Expr {
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Var(i) => subs.get(*i).cloned().unwrap_or_else(|| self.clone()),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(subs))),
            Expr::Add(a, b) => {
                Expr::Add(Box::new(a.substitute(subs)), Box::new(b.substitute(subs)))
            }
            Expr::Sub(a, b) => {
                Expr::Sub(Box::new(a.substitute(subs)), Box::new(b.substitute(subs)))
            }
            Expr::Mul(a, b) => {
                Expr::Mul(Box::new(a.substitute(subs)), Box::new(b.substitute(subs)))
            }
            Expr::Div(a, b) => {
                Expr::Div(Box::new(a.substitute(subs)), Box::new(b.substitute(subs)))
            }
            Expr::Pow(a, b) => Expr::Pow(Box::new(a.substitute(subs)), b.clone()),
            Expr::Call(func, a) => Expr::Call(*func, Box::new(a.substitute(subs))),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

/// A literal; negative values become `Neg(Num(|v|))` so printing round-trips.
pub fn num(v: f64) -> Expr {
    if v < 0.0 {
        Expr::Neg(Box::new(Expr::Num(-v)))
    } else {
        Expr::Num(if v == 0.0 { 0.0 } else { v })
    }
}

fn literal(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        Expr::Neg(a) => match **a {
            Expr::Num(v) => Some(-v),
            _ => None,
        },
        _ => None,
    }
}

fn fold(v: f64) -> Option<Expr> {
    v.is_finite().then(|| num(v))
}

pub fn var(i: usize) -> Expr {
    Expr::Var(i)
}

pub fn neg(a: Expr) -> Expr {
    if let Some(x) = literal(&a) {
        return num(-x);
    }
    match a {
        Expr::Neg(inner) => *inner,
        a => Expr::Neg(Box::new(a)),
    }
}

pub fn add(a: Expr, b: Expr) -> Expr {
    match (literal(&a), literal(&b)) {
        (Some(x), Some(y)) => fold(x + y).unwrap_or_else(|| Expr::Add(Box::new(a), Box::new(b))),
        (Some(0.0), _) => b,
        (_, Some(0.0)) => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    match (literal(&a), literal(&b)) {
        (Some(x), Some(y)) => fold(x - y).unwrap_or_else(|| Expr::Sub(Box::new(a), Box::new(b))),
        (_, Some(0.0)) => a,
        (Some(0.0), _) => neg(b),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    match (literal(&a), literal(&b)) {
        (Some(x), Some(y)) => fold(x * y).unwrap_or_else(|| Expr::Mul(Box::new(a), Box::new(b))),
        (Some(0.0), _) | (_, Some(0.0)) => num(0.0),
        (Some(1.0), _) => b,
        (_, Some(1.0)) => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

pub fn div(a: Expr, b: Expr) -> Expr {
    match (literal(&a), literal(&b)) {
        (Some(x), Some(y)) if y != 0.0 => {
            fold(x / y).unwrap_or_else(|| Expr::Div(Box::new(a), Box::new(b)))
        }
        (Some(0.0), _) => num(0.0),
        (_, Some(1.0)) => a,
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

pub fn pow(a: Expr, k: i32) -> Expr {
    if k == 0 {
        return num(1.0);
    }
    if k == 1 {
        return a;
    }
    if let Some(x) = literal(&a) {
        if x != 0.0 || k > 0 {
            if let Some(e) = fold(x.powi(k)) {
                return e;
            }
        }
    }
    Expr::Pow(Box::new(a), Box::new(num(k as f64)))
}

pub fn call(func: Func, a: Expr) -> Expr {
    match literal(&a).and_then(|x| fold(func.apply(x))) {
        Some(e) => e,
        None => Expr::Call(func, Box::new(a)),
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        add(self, rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        sub(self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        mul(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        neg(self)
    }
}

//! Real-valued expressions of `x` with named parameters.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! primary := number | 'x' | 'pi' | ident | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | sinh | cosh | tanh | exp | sqrt
//! ```
//!
//! The exponent of `^` must fold to a constant integer (`cosh(x)^2`,
//! `u^(-1)`), so that differentiation stays inside the same node set.
//! Any other identifier is a parameter bound at evaluation time through
//! a [`ParamEnv`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Parameter bindings, e.g. `A = 2`, `xi = 1`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamEnv(BTreeMap<String, f64>);

impl ParamEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.0.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, f64)> for ParamEnv {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Neg,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Neg => "-",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Neg => -v,
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Sinh => v.sinh(),
            Func::Cosh => v.cosh(),
            Func::Tanh => v.tanh(),
            Func::Exp => v.exp(),
            Func::Sqrt => v.sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Expression tree. Immutable once built; `Clone` is a deep copy.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Param(String),
    Unary(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown function `{name}` at column {pos}")]
    UnknownFunction { name: String, pos: usize },
}

impl ParseError {
    /// 0-based column offset of the error in the source text.
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. } | ParseError::UnknownFunction { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("division by zero at x = {x}")]
    DivisionByZero { x: f64 },
    #[error("square root of a negative value at x = {x}")]
    NegativeSqrt { x: f64 },
    #[error("non-finite value at x = {x}")]
    NonFinite { x: f64 },
}

impl Expr {
    pub fn parse(source: &str) -> Result<Expr, ParseError> {
        Parser::new(source).parse_all()
    }

    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn param(name: &str) -> Expr {
        Expr::Param(name.to_string())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// Names of all parameters referenced by the tree.
    pub fn free_params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Param(p) => {
                out.insert(p.clone());
            }
            Expr::Unary(_, a) | Expr::Pow(a, _) => a.collect_params(out),
            Expr::Binary(_, a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
            Expr::Const(_) | Expr::Var => {}
        }
    }

    /// Returns the first parameter of the tree not bound in `env`.
    pub fn check_bound(&self, env: &ParamEnv) -> Result<(), EvalError> {
        match self.free_params().into_iter().find(|p| env.get(p).is_none()) {
            Some(p) => Err(EvalError::UnboundParameter(p)),
            None => Ok(()),
        }
    }

    pub fn eval(&self, x: f64, env: &ParamEnv) -> Result<f64, EvalError> {
        let v = self.eval_inner(x, env)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { x })
        }
    }

    fn eval_inner(&self, x: f64, env: &ParamEnv) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var => x,
            Expr::Param(p) => env
                .get(p)
                .ok_or_else(|| EvalError::UnboundParameter(p.clone()))?,
            Expr::Unary(f, a) => {
                let v = a.eval_inner(x, env)?;
                if *f == Func::Sqrt && v < 0.0 {
                    return Err(EvalError::NegativeSqrt { x });
                }
                f.apply(v)
            }
            Expr::Binary(op, a, b) => {
                let l = a.eval_inner(x, env)?;
                let r = b.eval_inner(x, env)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == 0.0 {
                            return Err(EvalError::DivisionByZero { x });
                        }
                        l / r
                    }
                }
            }
            Expr::Pow(a, n) => {
                let v = a.eval_inner(x, env)?;
                if *n < 0 && v == 0.0 {
                    return Err(EvalError::DivisionByZero { x });
                }
                v.powi(*n)
            }
        })
    }

    /// Symbolic d/dx. Only constant folding is applied to the result.
    pub fn differentiate(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Param(_) => Expr::Const(0.0),
            Expr::Var => Expr::Const(1.0),
            Expr::Unary(f, a) => {
                let da = a.differentiate();
                let a = (**a).clone();
                let outer = match f {
                    Func::Neg => return neg(da),
                    Func::Sin => unary(Func::Cos, a),
                    Func::Cos => neg(unary(Func::Sin, a)),
                    Func::Sinh => unary(Func::Cosh, a),
                    Func::Cosh => unary(Func::Sinh, a),
                    Func::Tanh => pow(unary(Func::Cosh, a), -2),
                    Func::Exp => unary(Func::Exp, a),
                    Func::Sqrt => div(Expr::Const(0.5), unary(Func::Sqrt, a)),
                };
                mul(outer, da)
            }
            Expr::Binary(op, a, b) => {
                let da = a.differentiate();
                let db = b.differentiate();
                match op {
                    BinOp::Add => add(da, db),
                    BinOp::Sub => sub(da, db),
                    BinOp::Mul => add(mul(da, (**b).clone()), mul((**a).clone(), db)),
                    BinOp::Div => div(
                        sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                        pow((**b).clone(), 2),
                    ),
                }
            }
            Expr::Pow(a, n) => {
                if *n == 0 {
                    return Expr::Const(0.0);
                }
                let da = a.differentiate();
                mul(mul(Expr::Const(*n as f64), pow((**a).clone(), n - 1)), da)
            }
        }
    }
}

// Smart constructors with constant folding.

pub fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Unary(Func::Neg, inner) => *inner,
        a => Expr::Unary(Func::Neg, Box::new(a)),
    }
}

pub fn unary(f: Func, a: Expr) -> Expr {
    if f == Func::Neg {
        return neg(a);
    }
    if let Some(c) = a.as_const() {
        let v = f.apply(c);
        if v.is_finite() {
            return Expr::Const(v);
        }
    }
    Expr::Unary(f, Box::new(a))
}

pub fn add(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Const(x + y),
        (Some(0.0), None) => b,
        (None, Some(0.0)) => a,
        _ => Expr::Binary(BinOp::Add, Box::new(a), Box::new(b)),
    }
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Const(x - y),
        (Some(0.0), None) => neg(b),
        (None, Some(0.0)) => a,
        _ => Expr::Binary(BinOp::Sub, Box::new(a), Box::new(b)),
    }
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Const(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::Const(0.0),
        (Some(1.0), None) => b,
        (None, Some(1.0)) => a,
        (Some(-1.0), None) => neg(b),
        (None, Some(-1.0)) => neg(a),
        _ => Expr::Binary(BinOp::Mul, Box::new(a), Box::new(b)),
    }
}

pub fn div(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) if y != 0.0 => Expr::Const(x / y),
        (Some(0.0), _) => Expr::Const(0.0),
        (None, Some(1.0)) => a,
        _ => Expr::Binary(BinOp::Div, Box::new(a), Box::new(b)),
    }
}

pub fn pow(a: Expr, n: i32) -> Expr {
    match (a.as_const(), n) {
        (_, 0) => Expr::Const(1.0),
        (_, 1) => a,
        (Some(c), n) if c != 0.0 || n > 0 => Expr::Const(c.powi(n)),
        _ => Expr::Pow(Box::new(a), n),
    }
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expr::parse(s)
    }
}

impl Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Expr::parse(&s).map_err(serde::de::Error::custom)
    }
}

// Printing. Precedence levels: 1 additive, 2 multiplicative, 3 unary minus,
// 4 power, 5 atoms and calls.
impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Unary(Func::Neg, _) => 3,
            Expr::Const(c) if *c < 0.0 => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if *c < 0.0 {
                    write!(f, "-{}", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var => f.write_str("x"),
            Expr::Param(p) => f.write_str(p),
            Expr::Unary(Func::Neg, a) => {
                f.write_str("-")?;
                // -(-a) and -(a^n) need no help, but keep "-(a*b)" explicit
                a.fmt_child(f, 4)
            }
            Expr::Unary(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                a.fmt_child(f, p)?;
                write!(f, " {} ", op.symbol())?;
                // right operand of - and / binds tighter
                b.fmt_child(f, p + 1)
            }
            Expr::Pow(a, n) => {
                a.fmt_child(f, 5)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_all(mut self) -> Result<Expr, ParseError> {
        if self.peek().is_none() {
            return self.err(self.pos, "empty expression");
        }
        let e = self.expr()?;
        match self.peek() {
            None => Ok(e),
            Some(c) => self.err(self.pos, format!("unexpected `{}`", c as char)),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = add(lhs, self.term()?);
            } else if self.eat(b'-') {
                lhs = sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = mul(lhs, self.unary()?);
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let rhs = self.unary()?;
                if rhs.is_zero() {
                    return self.err(at, "division by constant zero");
                }
                lhs = div(lhs, rhs);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(neg(self.unary()?));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.peek().map(|_| self.pos).unwrap_or(self.pos);
        let exponent = self.unary()?;
        match exponent.as_const() {
            Some(c) if c.fract() == 0.0 && c.abs() <= i32::MAX as f64 => {
                let n = c as i32;
                if n < 0 && base.is_zero() {
                    return self.err(at, "negative power of constant zero");
                }
                Ok(pow(base, n))
            }
            _ => self.err(at, "exponent must be a constant integer"),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let start = match self.peek() {
            None => return self.err(self.pos, "unexpected end of input"),
            Some(_) => self.pos,
        };
        let c = self.bytes[start];
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            if !self.eat(b')') {
                return self.err(self.pos, "expected `)`");
            }
            return Ok(e);
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = start;
            while end < self.bytes.len()
                && (self.bytes[end].is_ascii_alphanumeric() || self.bytes[end] == b'_')
            {
                end += 1;
            }
            let name = &self.src[start..end];
            self.pos = end;
            if self.peek() == Some(b'(') {
                let Some(func) = Func::from_name(name) else {
                    return Err(ParseError::UnknownFunction {
                        name: name.to_string(),
                        pos: start,
                    });
                };
                self.pos += 1;
                let arg = self.expr()?;
                if !self.eat(b')') {
                    return self.err(self.pos, "expected `)`");
                }
                return Ok(unary(func, arg));
            }
            if Func::from_name(name).is_some() {
                return self.err(self.pos, format!("expected `(` after `{name}`"));
            }
            return Ok(match name {
                "x" => Expr::Var,
                "pi" => Expr::Const(std::f64::consts::PI),
                _ => Expr::Param(name.to_string()),
            });
        }
        self.err(start, format!("unexpected `{}`", c as char))
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let b = self.bytes;
        let mut end = start;
        while end < b.len() && (b[end].is_ascii_digit() || b[end] == b'.') {
            end += 1;
        }
        // exponent part, only if followed by digits
        if end < b.len() && (b[end] == b'e' || b[end] == b'E') {
            let mut k = end + 1;
            if k < b.len() && (b[k] == b'+' || b[k] == b'-') {
                k += 1;
            }
            if k < b.len() && b[k].is_ascii_digit() {
                while k < b.len() && b[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        self.pos = end;
        match self.src[start..end].parse::<f64>() {
            Ok(v) => Ok(Expr::Const(v)),
            Err(_) => self.err(start, format!("malformed number `{}`", &self.src[start..end])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    #[test]
    fn scarf_generator_parses_to_division() {
        let e = p("-A*sinh(x)/cosh(x)^2");
        assert!(matches!(e, Expr::Binary(BinOp::Div, ..)), "{e:?}");
        assert_eq!(e.free_params().into_iter().collect::<Vec<_>>(), vec!["A"]);
    }

    #[test]
    fn variable_node() {
        assert_eq!(p("x"), Expr::Var);
        assert_eq!(p("  x "), Expr::Var);
    }

    #[test]
    fn periodic_generator_parses() {
        let e = p("4*sin(2*x)/(3*(cos(x)^2-4/3)^2)");
        assert!(matches!(e, Expr::Binary(BinOp::Div, ..)));
        let env = ParamEnv::new();
        assert!(e.eval(std::f64::consts::FRAC_PI_2, &env).unwrap().abs() < 1e-14);
    }

    #[test]
    fn eval_examples() {
        let env = ParamEnv::new().with("A", 2.0);
        assert_eq!(p("-A*sinh(x)/cosh(x)^2").eval(0.0, &env).unwrap(), 0.0);
        let env = ParamEnv::new().with("xi", 1.0);
        assert_eq!(p("-xi*exp(-x)").eval(0.0, &env).unwrap(), -1.0);
    }

    #[test]
    fn precedence_and_associativity() {
        let env = ParamEnv::new();
        assert_eq!(p("2-3-4").eval(0.0, &env).unwrap(), -5.0);
        assert_eq!(p("8/4/2").eval(0.0, &env).unwrap(), 1.0);
        assert_eq!(p("-x^2").eval(3.0, &env).unwrap(), -9.0);
        assert_eq!(p("2*x^-1").eval(4.0, &env).unwrap(), 0.5);
        assert_eq!(p("1e-2*x").eval(100.0, &env).unwrap(), 1.0);
        assert_eq!(p("2*pi").eval(0.0, &env).unwrap(), 2.0 * std::f64::consts::PI);
    }

    #[test]
    fn eval_errors() {
        let env = ParamEnv::new();
        assert_eq!(
            p("A*x").eval(1.0, &env),
            Err(EvalError::UnboundParameter("A".into()))
        );
        assert_eq!(p("1/x").eval(0.0, &env), Err(EvalError::DivisionByZero { x: 0.0 }));
        assert_eq!(p("x^-2").eval(0.0, &env), Err(EvalError::DivisionByZero { x: 0.0 }));
        assert!(matches!(p("sqrt(x)").eval(-1.0, &env), Err(EvalError::NegativeSqrt { .. })));
    }

    #[test]
    fn parse_errors_carry_columns() {
        let e = Expr::parse("2*foo(x)").unwrap_err();
        assert_eq!(e, ParseError::UnknownFunction { name: "foo".into(), pos: 2 });
        assert_eq!(Expr::parse("x+").unwrap_err().position(), 2);
        assert_eq!(Expr::parse("(x").unwrap_err().position(), 2);
        assert_eq!(Expr::parse("x^y").unwrap_err().position(), 2);
        assert_eq!(Expr::parse("x^1.5").unwrap_err().position(), 2);
        assert_eq!(Expr::parse("x $ 2").unwrap_err().position(), 2);
        assert_eq!(Expr::parse("").unwrap_err().position(), 0);
        assert!(Expr::parse("sin x").is_err());
        assert!(Expr::parse("1/0").is_err());
    }

    #[test]
    fn derivative_rules() {
        assert_eq!(p("sinh(x)").differentiate(), p("cosh(x)"));
        let env = ParamEnv::new().with("xi", 1.7);
        let d = p("-xi*exp(-x)").differentiate();
        for &x in &[-1.0, 0.0, 0.3, 2.0] {
            let expect = 1.7 * f64::exp(-x);
            assert!((d.eval(x, &env).unwrap() - expect).abs() < 1e-14);
        }
        assert_eq!(p("3").differentiate(), Expr::Const(0.0));
        assert_eq!(p("x^0").differentiate(), Expr::Const(0.0));
    }

    #[test]
    fn constant_folding() {
        assert_eq!(p("4/3"), Expr::Const(4.0 / 3.0));
        assert_eq!(p("2*(3+1)"), Expr::Const(8.0));
        assert_eq!(p("0*x"), Expr::Const(0.0));
        assert_eq!(p("cos(0)"), Expr::Const(1.0));
    }

    #[test]
    fn print_round_trip() {
        let env = ParamEnv::new().with("A", 1.3).with("xi", 0.7);
        for src in [
            "-A*sinh(x)/cosh(x)^2",
            "4*sin(2*x)/(3*(cos(x)^2-4/3)^2)",
            "-xi*exp(-x)",
            "x-(x-1)",
            "1/(x/2)",
            "(-x)^3",
            "-(x+1)^2",
            "-x^-2",
            "sqrt(x*x+1)-tanh(-x)",
        ] {
            let e = p(src);
            let back = p(&e.to_string());
            for &x in &[-1.3, 0.4, 2.2] {
                let a = e.eval(x, &env).unwrap();
                let b = back.eval(x, &env).unwrap();
                assert_eq!(a, b, "{src} -> {e}");
            }
        }
    }
}

//! Taylor jets of the right-hand side and of the solution.
//!
//! A jet stores normalised coefficients `x^[k] = x^(k)/k!`. The right-hand
//! side is an interpreted expression tree over `z1 = x(t - τ)` and
//! `z2 = x(t)`; its jet is obtained by propagating jets through the tree.

use crate::error::{Error, Result};
use crate::interval::{parse_decimal, Interval, IntervalError};
use std::fmt;

/// Arithmetic needed to push jets through an expression.
pub trait Scalar: Clone + fmt::Debug {
    fn constant(c: Interval) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, o: &Self) -> std::result::Result<Self, IntervalError>;
    fn div_int(&self, k: u64) -> Self;

    fn zero() -> Self {
        Self::constant(Interval::ZERO)
    }
}

impl Scalar for Interval {
    fn constant(c: Interval) -> Self {
        c
    }
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn sub(&self, o: &Self) -> Self {
        *self - *o
    }
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn div(&self, o: &Self) -> std::result::Result<Self, IntervalError> {
        self.try_div(*o)
    }
    fn div_int(&self, k: u64) -> Self {
        self.try_div(Interval::from_int(k as i64)).expect("positive integer divisor")
    }
}

/// Plain floating point, for non-rigorous simulation. Constants use midpoints.
impl Scalar for f64 {
    fn constant(c: Interval) -> Self {
        c.mid()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> std::result::Result<Self, IntervalError> {
        if *o == 0.0 {
            Err(IntervalError::DivisionByZeroInterval)
        } else {
            Ok(self / o)
        }
    }
    fn div_int(&self, k: u64) -> Self {
        self / k as f64
    }
}

/// Interval value with an interval gradient. An empty gradient means zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual {
    pub value: Interval,
    pub grad: Vec<Interval>,
}

impl Dual {
    /// The `idx`-th of `dim` independent variables, with value `v`.
    pub fn variable(v: Interval, idx: usize, dim: usize) -> Dual {
        let mut grad = vec![Interval::ZERO; dim];
        grad[idx] = Interval::ONE;
        Dual { value: v, grad }
    }

    pub fn grad_at(&self, i: usize) -> Interval {
        self.grad.get(i).copied().unwrap_or(Interval::ZERO)
    }

    fn zip(&self, o: &Dual, f: impl Fn(Interval, Interval) -> Interval) -> Vec<Interval> {
        let n = self.grad.len().max(o.grad.len());
        (0..n).map(|i| f(self.grad_at(i), o.grad_at(i))).collect()
    }

    fn scaled_grad(&self, s: Interval) -> Vec<Interval> {
        self.grad.iter().map(|&g| g * s).collect()
    }
}

impl Scalar for Dual {
    fn constant(c: Interval) -> Self {
        Dual { value: c, grad: Vec::new() }
    }
    fn add(&self, o: &Self) -> Self {
        Dual { value: self.value + o.value, grad: self.zip(o, |a, b| a + b) }
    }
    fn sub(&self, o: &Self) -> Self {
        Dual { value: self.value - o.value, grad: self.zip(o, |a, b| a - b) }
    }
    fn mul(&self, o: &Self) -> Self {
        let (a, b) = (self.value, o.value);
        Dual { value: a * b, grad: self.zip(o, |da, db| da * b + a * db) }
    }
    fn neg(&self) -> Self {
        Dual { value: -self.value, grad: self.grad.iter().map(|&g| -g).collect() }
    }
    fn div(&self, o: &Self) -> std::result::Result<Self, IntervalError> {
        let q = self.value.try_div(o.value)?;
        let mut grad = Vec::with_capacity(self.grad.len().max(o.grad.len()));
        for i in 0..self.grad.len().max(o.grad.len()) {
            grad.push((self.grad_at(i) - q * o.grad_at(i)).try_div(o.value)?);
        }
        Ok(Dual { value: q, grad })
    }
    fn div_int(&self, k: u64) -> Self {
        let d = Interval::from_int(k as i64);
        Dual {
            value: self.value.div_int(k),
            grad: self.grad.iter().map(|g| g.try_div(d).expect("positive integer divisor")).collect(),
        }
    }
}

impl Dual {
    pub fn scale(&self, s: Interval) -> Dual {
        Dual { value: self.value * s, grad: self.scaled_grad(s) }
    }
}

/// Normalised Taylor coefficients `[x^[0], ..., x^[order]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S = Interval> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    /// Panics on an empty coefficient list.
    pub fn new(coeffs: Vec<S>) -> Jet<S> {
        assert!(!coeffs.is_empty(), "a jet has at least one coefficient");
        Jet { coeffs }
    }

    pub fn constant(c: S, order: usize) -> Jet<S> {
        let mut coeffs = vec![S::zero(); order + 1];
        coeffs[0] = c;
        Jet { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn get(&self, k: usize) -> &S {
        &self.coeffs[k]
    }
}

impl<S> std::ops::Index<usize> for Jet<S> {
    type Output = S;
    fn index(&self, k: usize) -> &S {
        &self.coeffs[k]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Interval),
    /// Delayed argument `x(t - τ)`.
    Z1,
    /// Current argument `x(t)`.
    Z2,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// The denominator is checked at evaluation time.
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// Right-hand side `f(z1, z2)` of `x'(t) = f(x(t - τ), x(t))`.
#[derive(Clone, Debug, PartialEq)]
pub struct RhsSpec {
    expr: Expr,
    source: Option<String>,
}

impl RhsSpec {
    pub fn new(expr: Expr) -> RhsSpec {
        RhsSpec { expr, source: None }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Parses an infix expression over `z1`, `z2`, decimal literals and the
    /// given named constants, with `+ - * / ^` and parentheses. Exponents
    /// must be non-negative integers.
    pub fn parse(text: &str, params: &[(&str, Interval)]) -> Result<RhsSpec> {
        let tokens = lex(text)?;
        let mut p = Parser { tokens: &tokens, pos: 0, params };
        let expr = p.expr()?;
        if p.pos != tokens.len() {
            return Err(Error::ParseError(format!("unexpected {:?} in {text:?}", tokens[p.pos])));
        }
        Ok(RhsSpec { expr, source: Some(text.trim().to_string()) })
    }

    /// `f(z1, z2)` for scalar arguments.
    pub fn eval<S: Scalar>(&self, z1: &S, z2: &S) -> Result<S> {
        let j = jet_of(&self.expr, std::slice::from_ref(z1), std::slice::from_ref(z2), 0)?;
        Ok(j.into_iter().next().expect("order 0 jet"))
    }
}

impl fmt::Display for RhsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            Some(s) => f.write_str(s),
            None => write!(f, "{}", self.expr),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if c.is_point() => write!(f, "{}", c.lo()),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Z1 => f.write_str("z1"),
            Expr::Z2 => f.write_str("z2"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a} * {b}"),
            Expr::Div(a, b) => write!(f, "{a} / ({b})"),
            Expr::Pow(a, e) => write!(f, "({a})^{e}"),
        }
    }
}

/// `β·z1/(1 + z1^n) - γ·z2`.
pub fn mg_rhs(beta: Interval, gamma: Interval, n_exp: u32) -> RhsSpec {
    use Expr::*;
    assert!(n_exp >= 1, "exponent must be positive");
    let num = Mul(Box::new(Const(beta)), Box::new(Z1));
    let den = Add(Box::new(Const(Interval::ONE)), Box::new(Pow(Box::new(Z1), n_exp)));
    let decay = Mul(Box::new(Const(gamma)), Box::new(Z2));
    RhsSpec::new(Sub(Box::new(Div(Box::new(num), Box::new(den))), Box::new(decay)))
}

fn jet_mul<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    (0..a.len())
        .map(|j| {
            let mut acc = a[0].mul(&b[j]);
            for i in 1..=j {
                acc = acc.add(&a[i].mul(&b[j - i]));
            }
            acc
        })
        .collect()
}

fn jet_div<S: Scalar>(a: &[S], b: &[S]) -> Result<Vec<S>> {
    let mut q: Vec<S> = Vec::with_capacity(a.len());
    for j in 0..a.len() {
        let mut num = a[j].clone();
        for i in 1..=j {
            num = num.sub(&b[i].mul(&q[j - i]));
        }
        q.push(num.div(&b[0])?);
    }
    Ok(q)
}

fn jet_pow<S: Scalar>(a: &[S], e: u32) -> Vec<S> {
    if e == 0 {
        let mut one = vec![S::zero(); a.len()];
        one[0] = S::constant(Interval::ONE);
        return one;
    }
    // binary exponentiation by repeated jet products
    let mut base = a.to_vec();
    let mut acc: Option<Vec<S>> = None;
    let mut e = e;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(x) => jet_mul(&x, &base),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = jet_mul(&base, &base);
    }
    acc.expect("positive exponent")
}

fn jet_of<S: Scalar>(e: &Expr, u: &[S], v: &[S], k: usize) -> Result<Vec<S>> {
    Ok(match e {
        Expr::Const(c) => {
            let mut j = vec![S::zero(); k + 1];
            j[0] = S::constant(*c);
            j
        }
        Expr::Z1 => u[..=k].to_vec(),
        Expr::Z2 => v[..=k].to_vec(),
        Expr::Neg(a) => jet_of(a, u, v, k)?.iter().map(S::neg).collect(),
        Expr::Add(a, b) => {
            let (x, y) = (jet_of(a, u, v, k)?, jet_of(b, u, v, k)?);
            x.iter().zip(&y).map(|(p, q)| p.add(q)).collect()
        }
        Expr::Sub(a, b) => {
            let (x, y) = (jet_of(a, u, v, k)?, jet_of(b, u, v, k)?);
            x.iter().zip(&y).map(|(p, q)| p.sub(q)).collect()
        }
        Expr::Mul(a, b) => match (a.as_ref(), b.as_ref()) {
            (Expr::Const(c), other) | (other, Expr::Const(c)) => {
                let s = S::constant(*c);
                jet_of(other, u, v, k)?.iter().map(|x| s.mul(x)).collect()
            }
            _ => jet_mul(&jet_of(a, u, v, k)?, &jet_of(b, u, v, k)?),
        },
        Expr::Div(a, b) => jet_div(&jet_of(a, u, v, k)?, &jet_of(b, u, v, k)?)?,
        Expr::Pow(a, n) => jet_pow(&jet_of(a, u, v, k)?, *n),
    })
}

/// Jet through order `k` of `t ↦ f(u(t), v(t))`: entry j is `F^[j]`.
pub fn rhs_jet<S: Scalar>(f: &RhsSpec, u: &Jet<S>, v: &Jet<S>, k: usize) -> Result<Jet<S>> {
    if u.order() < k || v.order() < k {
        return Err(Error::OrderTooLow(format!(
            "rhs_jet of order {k} needs input jets of order {k}, got {} and {}",
            u.order(),
            v.order()
        )));
    }
    rhs_jet_slices(f, u.coeffs(), v.coeffs(), k).map(Jet::new)
}

pub(crate) fn rhs_jet_slices<S: Scalar>(f: &RhsSpec, u: &[S], v: &[S], k: usize) -> Result<Vec<S>> {
    jet_of(&f.expr, u, v, k)
}

/// Solution jet from `x'(t) = f(x(t - τ), x(t))`: `v[0] = v0` and
/// `v[k+1] = F^[k](u, v) / (k+1)`, each new coefficient feeding the next.
pub fn advance_solution_jet<S: Scalar>(f: &RhsSpec, u: &Jet<S>, v0: S, order: usize) -> Result<Jet<S>> {
    if order > 0 && u.order() + 1 < order {
        return Err(Error::OrderTooLow(format!("solution jet of order {order} needs a delayed jet of order {}", order - 1)));
    }
    advance_slices(f, u.coeffs(), v0, order).map(Jet::new)
}

pub(crate) fn advance_slices<S: Scalar>(f: &RhsSpec, u: &[S], v0: S, order: usize) -> Result<Vec<S>> {
    let mut v = Vec::with_capacity(order + 1);
    v.push(v0);
    for k in 0..order {
        let g = jet_of(&f.expr, u, &v, k)?;
        v.push(g[k].div_int(k as u64 + 1));
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(chars[start..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::ParseError(format!("unexpected character {c:?} in {text:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Tok],
    pos: usize,
    params: &'a [(&'a str, Interval)],
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' { Expr::Add(lhs.into(), rhs.into()) } else { Expr::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' { Expr::Mul(lhs.into(), rhs.into()) } else { Expr::Div(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(self.unary()?.into()));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let e = self.exponent()?;
            return Ok(Expr::Pow(base.into(), e));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        let value = match tok {
            Some(Tok::Num(s)) => parse_decimal(&s)?,
            Some(Tok::Ident(name)) => self.param(&name)?,
            other => return Err(Error::ParseError(format!("expected exponent, found {other:?}"))),
        };
        let e = value.lo();
        if !value.is_point() || e < 0.0 || e.fract() != 0.0 || e > u32::MAX as f64 {
            return Err(Error::ParseError(format!("exponent {value} is not a non-negative integer")));
        }
        Ok(e as u32)
    }

    fn param(&self, name: &str) -> Result<Interval> {
        self.params
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::ParseError(format!("unknown name {name:?}")))
    }

    fn primary(&mut self) -> Result<Expr> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Num(s)) => Ok(Expr::Const(parse_decimal(&s)?)),
            Some(Tok::Ident(name)) => match name.as_str() {
                "z1" => Ok(Expr::Z1),
                "z2" => Ok(Expr::Z2),
                _ => Ok(Expr::Const(self.param(&name)?)),
            },
            Some(Tok::Op('(')) => {
                let e = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::ParseError("missing ')'".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            other => Err(Error::ParseError(format!("unexpected token {other:?}"))),
        }
    }
}

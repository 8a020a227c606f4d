//! Exact-rational multivariate polynomials.
//!
//! Monomials are ordered graded-lexicographically over the declared variable
//! order. A polynomial does not own its variable names; names live in the
//! [`FrameModel`](crate::frame::FrameModel) (or any caller-side ring) and are
//! only needed for parsing and printing.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational literal `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

pub fn rational_to_f64(v: &Q) -> f64 {
    let n = v.numer().to_f64().unwrap_or(f64::NAN);
    let d = v.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        // Only reached for astronomically large numerators/denominators.
        let shift = v.denom().bits().max(v.numer().bits()) as i64 - 900;
        let scale = BigInt::one() << (shift.max(0) as usize);
        let n = (v.numer() / &scale).to_f64().unwrap_or(0.0);
        let d = (v.denom() / &scale).to_f64().unwrap_or(1.0);
        n / d
    }
}

/// Exponent vector with trailing zeros trimmed, so the constant monomial is
/// the empty vector regardless of the ambient number of variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn var(i: usize) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = 1;
        Monomial(v)
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let len = self.0.len().max(other.0.len());
        let v = (0..len).map(|i| self.exponent(i) + other.exponent(i)).collect();
        Monomial(v)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut v = self.0.clone();
        for (i, e) in other.0.iter().enumerate() {
            if v[i] < *e {
                return None;
            }
            v[i] -= e;
        }
        Some(Monomial::new(v))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let len = self.0.len().max(other.0.len());
            for i in 0..len {
                match self.exponent(i).cmp(&other.exponent(i)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(q(n))
    }

    pub fn var(i: usize) -> Self {
        Poly::monomial(Monomial::var(i), Q::one())
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial, `None` otherwise.
    pub fn as_constant(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    /// Highest variable index appearing plus one.
    pub fn nvars_used(&self) -> usize {
        self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(i);
            if e == 0 {
                continue;
            }
            let mut v = m.0.clone();
            v[i] -= 1;
            out.add_term(Monomial::new(v), c * q(e as i64));
        }
        out
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, e) in m.0.iter().enumerate() {
                if *e > 0 {
                    let x = point.get(i).cloned().unwrap_or_else(Q::zero);
                    t *= num_traits::pow(x, *e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = rational_to_f64(c);
                for (i, e) in m.0.iter().enumerate() {
                    if *e > 0 {
                        t *= point.get(i).copied().unwrap_or(0.0).powi(*e as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading()?;
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading() {
            let qm = m.div(lm)?;
            let qc = c / lc;
            let t = Poly::monomial(qm, qc);
            rem -= &(&t * divisor);
            quot += &t;
        }
        Some(quot)
    }

    /// Substitutes polynomial values for every variable.
    pub fn substitute(&self, values: &[Poly]) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for (i, e) in m.0.iter().enumerate() {
                if *e > 0 {
                    t = &t * &values[i].pow(*e);
                }
            }
            out += &t;
        }
        out
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }

    pub fn to_text(&self, names: &[String]) -> String {
        self.display(names).to_string()
    }

    /// Parses the `+ - * ^` grammar with integer / `p/q` literals and the
    /// given variable names. Parentheses are allowed for grouping.
    pub fn parse(text: &str, names: &[String]) -> Result<Poly> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0, names, src: text };
        let out = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(out)
    }
}

impl From<Q> for Poly {
    fn from(c: Q) -> Self {
        Poly::constant(c)
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += &rhs;
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        self -= &rhs;
        self
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

fn var_name(names: &[String], i: usize) -> String {
    names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1))
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if m.is_one() || !abs.is_one() {
                factors.push(abs.to_string());
            }
            for (i, e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(var_name(self.names, i)),
                    e => factors.push(format!("{}^{}", var_name(self.names, i), e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1
            }
            '-' => {
                out.push(Token::Minus);
                i += 1
            }
            '*' => {
                out.push(Token::Star);
                i += 1
            }
            '^' => {
                out.push(Token::Caret);
                i += 1
            }
            '/' => {
                out.push(Token::Slash);
                i += 1
            }
            '(' => {
                out.push(Token::LParen);
                i += 1
            }
            ')' => {
                out.push(Token::RParen);
                i += 1
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token::Int(s.parse().expect("digits")));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => {
                return Err(Error::Parse(format!(
                    "unexpected character `{other}` in polynomial `{text}`"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    names: &'a [String],
    src: &'a str,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at token {} in polynomial `{}`", self.pos, self.src))
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                -self.term()?
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc += &self.term()?;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc -= &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while let Some(Token::Star) = self.peek() {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        if let Some(Token::Minus) = self.peek() {
            self.pos += 1;
            return Ok(-self.factor()?);
        }
        let base = self.base()?;
        if let Some(Token::Caret) = self.peek() {
            self.pos += 1;
            match self.next() {
                Some(Token::Int(e)) => {
                    let e = e.to_u32().ok_or_else(|| self.error("exponent too large"))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(self.error("expected integer exponent")),
            }
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Poly> {
        match self.next() {
            Some(Token::Int(n)) => {
                if let Some(Token::Slash) = self.peek() {
                    self.pos += 1;
                    match self.next() {
                        Some(Token::Int(d)) if !d.is_zero() => Ok(Poly::constant(Q::new(n, d))),
                        _ => Err(self.error("expected nonzero integer denominator")),
                    }
                } else {
                    Ok(Poly::constant(Q::from_integer(n)))
                }
            }
            Some(Token::Ident(name)) => match self.names.iter().position(|v| *v == name) {
                Some(i) => Ok(Poly::var(i)),
                None => Err(Error::Parse(format!(
                    "unknown variable `{name}` in polynomial `{}`",
                    self.src
                ))),
            },
            Some(Token::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(e),
                    _ => Err(self.error("expected `)`")),
                }
            }
            _ => Err(self.error("expected a number, variable or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    #[test]
    fn grlex_order() {
        // x^2 > x*y > y^2 > x > y > z > 1
        let mut ms = vec![
            Monomial::one(),
            Monomial::new(vec![0, 0, 1]),
            Monomial::new(vec![0, 1]),
            Monomial::new(vec![1]),
            Monomial::new(vec![0, 2]),
            Monomial::new(vec![1, 1]),
            Monomial::new(vec![2]),
        ];
        let sorted = ms.clone();
        ms.reverse();
        ms.sort();
        assert_eq!(ms, sorted);
    }

    #[test]
    fn parse_and_print() {
        let n = names();
        let p = Poly::parse("z + y/2*x", &n);
        assert!(p.is_err(), "division outside literals is not part of the grammar");
        let p = Poly::parse("z + 1/2*y*x - 3 + x^2", &n).unwrap();
        assert_eq!(p.to_text(&n), "x^2 + 1/2*x*y + z - 3");
        let p = Poly::parse("-(x - 1)^2", &n).unwrap();
        assert_eq!(p.to_text(&n), "-x^2 + 2*x - 1");
        assert_eq!(Poly::zero().to_text(&n), "0");
        assert!(Poly::parse("w", &n).is_err());
        assert!(Poly::parse("1/0", &n).is_err());
    }

    #[test]
    fn zero_terms_are_dropped() {
        let n = names();
        let p = Poly::parse("x - x", &n).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn derivative_and_eval() {
        let n = names();
        let p = Poly::parse("x^2*y + 3*z", &n).unwrap();
        assert_eq!(p.derivative(0).to_text(&n), "2*x*y");
        assert_eq!(p.derivative(2).to_text(&n), "3");
        assert_eq!(p.eval(&[q(2), q(3), qr(1, 3)]), q(13));
    }

    #[test]
    fn exact_division() {
        let n = names();
        let a = Poly::parse("x^2 - y^2", &n).unwrap();
        let b = Poly::parse("x + y", &n).unwrap();
        assert_eq!(a.div_exact(&b).unwrap().to_text(&n), "x - y");
        assert!(Poly::parse("x^2 + 1", &n).unwrap().div_exact(&b).is_none());
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec(((0u32..3, 0u32..3, 0u32..2), -5i64..6, 1i64..4), 0..5).prop_map(
            |terms| {
                let mut p = Poly::zero();
                for ((a, b, c), n, d) in terms {
                    p += &Poly::monomial(Monomial::new(vec![a, b, c]), qr(n, d));
                }
                p
            },
        )
    }

    proptest! {
        #[test]
        fn text_round_trip(p in arb_poly()) {
            let n = names();
            let text = p.to_text(&n);
            let back = Poly::parse(&text, &n).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(back.to_text(&n), text);
        }

        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)));
            prop_assert_eq!(&a * &b, &b * &a);
            let prod = &a * &b;
            if !b.is_zero() {
                prop_assert_eq!(prod.div_exact(&b).unwrap(), a.clone());
            }
            // Leibniz rule
            prop_assert_eq!(prod.derivative(0), &(&a.derivative(0) * &b) + &(&a * &b.derivative(0)));
        }
    }
}

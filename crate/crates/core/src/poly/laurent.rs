use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::PolyError;

/// Laurent polynomial in one parameter with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is
/// mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<i32, BigRational>,
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::monomial(c, 0)
    }

    pub fn from_int(c: i64) -> Self {
        Poly::constant(int(c))
    }

    /// The parameter itself.
    pub fn var() -> Self {
        Poly::monomial(BigRational::one(), 1)
    }

    pub fn monomial(c: BigRational, exp: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Poly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (i32, BigRational)>) -> Self {
        let mut p = Poly::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: i32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&e| e == 0)
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, &BigRational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exp: i32) -> BigRational {
        self.terms.get(&exp).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn degree(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn leading(&self) -> Option<(i32, &BigRational)> {
        self.terms.iter().next_back().map(|(e, c)| (*e, c))
    }

    /// True when no negative exponents occur.
    pub fn is_ordinary(&self) -> bool {
        self.min_exp().is_none_or(|e| e >= 0)
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(e, c)| (*e, c * k)))
    }

    /// Multiplies by `n^k`.
    pub fn shift(&self, k: i32) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn eval(&self, n: &BigRational) -> BigRational {
        if n.is_integer() && !n.is_zero() {
            return self.eval_integer(n.numer());
        }
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            acc += c * pow(n, *e);
        }
        acc
    }

    /// Horner's rule on integer coefficients scaled by the common
    /// denominator, so only the final quotient is reduced.
    fn eval_integer(&self, n: &BigInt) -> BigRational {
        let (Some(lo), Some(hi)) = (self.min_exp(), self.degree()) else {
            return BigRational::zero();
        };
        let lo = lo.min(0);
        let d = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut s = BigInt::zero();
        for e in (lo..=hi).rev() {
            s *= n;
            if let Some(c) = self.terms.get(&e) {
                s += c.numer() * (&d / c.denom());
            }
        }
        BigRational::new(s, d * num_traits::pow(n.clone(), (-lo) as usize))
    }

    pub fn eval_int(&self, n: i64) -> BigRational {
        self.eval(&int(n))
    }

    /// Floating-point evaluation for fast repeated queries.
    pub fn eval_f64(&self, n: f64) -> f64 {
        self.terms.iter().map(|(e, c)| to_f64(c) * n.powi(*e)).sum()
    }

    /// Sign of the polynomial as the parameter grows without bound.
    pub fn asymptotic_sign(&self) -> i32 {
        match self.leading() {
            None => 0,
            Some((_, c)) if c.is_positive() => 1,
            Some(_) => -1,
        }
    }

    /// Quotient and remainder for ordinary polynomials.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let (dd, dc) = d.leading().expect("division by zero polynomial");
        let dc = dc.clone();
        let mut q = Poly::zero();
        let mut r = self.clone();
        while let Some((re, rc)) = r.leading() {
            if re < dd {
                break;
            }
            let t = Poly::monomial(rc / &dc, re - dd);
            r = &r - &(&t * d);
            q = &q + &t;
        }
        (q, r)
    }

    /// Renders with the given parameter name.
    pub fn render(&self, var: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&render_term(&c.abs(), *e, var));
        }
        out
    }
}

pub(crate) fn to_f64(c: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(f64::NAN)
}

fn pow(n: &BigRational, e: i32) -> BigRational {
    if e >= 0 {
        num_traits::pow(n.clone(), e as usize)
    } else {
        num_traits::pow(n.recip(), (-e) as usize)
    }
}

fn monomial_text(var: &str, e: i32) -> String {
    if e == 1 {
        var.to_string()
    } else {
        format!("{var}^{e}")
    }
}

fn render_term(c: &BigRational, e: i32, var: &str) -> String {
    let p = c.numer();
    let q = c.denom();
    if e == 0 {
        return c.to_string();
    }
    if e > 0 {
        let mut s = String::new();
        if !p.is_one() {
            s.push_str(&p.to_string());
        }
        s.push_str(&monomial_text(var, e));
        if !q.is_one() {
            s.push('/');
            s.push_str(&q.to_string());
        }
        return s;
    }
    let mon = monomial_text(var, -e);
    if q.is_one() {
        format!("{p}/{mon}")
    } else {
        format!("{p}/({q}{mon})")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("n"))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl FromStr for Poly {
    type Err = PolyError;

    /// Parses the rendering produced by `Display`, e.g.
    /// `9n/8 - 47/8 - 31/(32n)` or `n^2/8 + 3n/8`. Any single-letter
    /// variable name is accepted.
    fn from_str(s: &str) -> Result<Self, PolyError> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let mut out = Poly::zero();
        if chars.is_empty() {
            return Err(PolyError::Parse(s.to_string()));
        }
        let bad = || PolyError::Parse(s.to_string());
        loop {
            let mut sign = 1;
            while pos < chars.len() && (chars[pos] == '+' || chars[pos] == '-') {
                if chars[pos] == '-' {
                    sign = -sign;
                }
                pos += 1;
            }
            let (coef, exp) = parse_term(&chars, &mut pos).ok_or_else(bad)?;
            out.add_term(exp, coef * int(sign));
            if pos >= chars.len() {
                break;
            }
            if chars[pos] != '+' && chars[pos] != '-' {
                return Err(bad());
            }
        }
        Ok(out)
    }
}

fn parse_int(chars: &[char], pos: &mut usize) -> Option<BigInt> {
    let start = *pos;
    while *pos < chars.len() && chars[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        return None;
    }
    chars[start..*pos].iter().collect::<String>().parse().ok()
}

fn parse_var(chars: &[char], pos: &mut usize) -> Option<i32> {
    if *pos < chars.len() && chars[*pos].is_ascii_alphabetic() {
        *pos += 1;
        if *pos < chars.len() && chars[*pos] == '^' {
            *pos += 1;
            let e = parse_int(chars, pos)?;
            return i32::try_from(e).ok();
        }
        return Some(1);
    }
    None
}

fn parse_term(chars: &[char], pos: &mut usize) -> Option<(BigRational, i32)> {
    let p = parse_int(chars, pos);
    if p.is_some() && *pos < chars.len() && chars[*pos] == '*' {
        *pos += 1;
    }
    let e = parse_var(chars, pos);
    if p.is_none() && e.is_none() {
        return None;
    }
    let p = p.unwrap_or_else(BigInt::one);
    let e = e.unwrap_or(0);
    if *pos < chars.len() && chars[*pos] == '/' {
        *pos += 1;
        if *pos < chars.len() && chars[*pos] == '(' {
            *pos += 1;
            let q = parse_int(chars, pos).unwrap_or_else(BigInt::one);
            let k = parse_var(chars, pos)?;
            if chars.get(*pos) != Some(&')') || e != 0 {
                return None;
            }
            *pos += 1;
            return Some((BigRational::new(p, q), -k));
        }
        if let Some(q) = parse_int(chars, pos) {
            if q.is_zero() {
                return None;
            }
            return Some((BigRational::new(p, q), e));
        }
        let k = parse_var(chars, pos)?;
        if e != 0 {
            return None;
        }
        return Some((BigRational::from_integer(p), -k));
    }
    Some((BigRational::from_integer(p), e))
}

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Poly;

/// Quotient of two ordinary polynomials in the parameter, kept reduced:
/// common factors removed, integer coefficients with unit content, and a
/// positive leading denominator coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        let mut r = RationalFn { num, den };
        r.normalize();
        r
    }

    pub fn zero() -> Self {
        RationalFn::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        RationalFn::from_poly(Poly::from_int(1))
    }

    /// Accepts Laurent input; negative exponents move to the denominator.
    pub fn from_poly(p: Poly) -> Self {
        match p.min_exp() {
            Some(e) if e < 0 => RationalFn::new(p.shift(-e), Poly::monomial(BigRational::one(), -e)),
            _ => RationalFn::new(p, Poly::from_int(1)),
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Laurent form, available when the denominator is a monomial.
    pub fn to_laurent(&self) -> Option<Poly> {
        let mut it = self.den.terms();
        let (e, c) = it.next()?;
        if it.next().is_some() {
            return None;
        }
        Some(self.num.scale(&c.recip()).shift(-e))
    }

    pub fn eval(&self, n: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(n);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(n) / d)
        }
    }

    pub fn eval_f64(&self, n: f64) -> f64 {
        self.num.eval_f64(n) / self.den.eval_f64(n)
    }

    /// Sign as the parameter grows without bound.
    pub fn asymptotic_sign(&self) -> i32 {
        self.num.asymptotic_sign() * self.den.asymptotic_sign()
    }

    /// Limit as the parameter grows without bound, when finite.
    pub fn limit(&self) -> Option<BigRational> {
        let (nd, nc) = match self.num.leading() {
            None => return Some(BigRational::zero()),
            Some(t) => t,
        };
        let (dd, dc) = self.den.leading()?;
        match nd.cmp(&dd) {
            std::cmp::Ordering::Less => Some(BigRational::zero()),
            std::cmp::Ordering::Equal => Some(nc / dc),
            std::cmp::Ordering::Greater => None,
        }
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::from_int(1);
            return;
        }
        let g = poly_gcd(&self.num, &self.den);
        if g.degree().unwrap_or(0) > 0 {
            self.num = self.num.div_rem(&g).0;
            self.den = self.den.div_rem(&g).0;
        }
        let lcm = denominators_lcm(&self.num).lcm(&denominators_lcm(&self.den));
        let k = BigRational::from_integer(lcm);
        let num = self.num.scale(&k);
        let den = self.den.scale(&k);
        let g = content(&num).gcd(&content(&den));
        let mut k = BigRational::new(BigInt::one(), g);
        if den.leading().is_some_and(|(_, c)| c.is_negative()) {
            k = -k;
        }
        self.num = num.scale(&k);
        self.den = den.scale(&k);
    }
}

fn denominators_lcm(p: &Poly) -> BigInt {
    p.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()))
}

fn content(p: &Poly) -> BigInt {
    p.terms().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()))
}

fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = a.div_rem(&b).1;
        a = b;
        b = r;
    }
    a
}

impl RationalFn {
    /// Laurent form when possible, otherwise `(num)/(den)`.
    pub fn render(&self, var: &str) -> String {
        match self.to_laurent() {
            Some(p) => p.render(var),
            None => format!("({})/({})", self.num.render(var), self.den.render(var)),
        }
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("n"))
    }
}

impl Add for &RationalFn {
    type Output = RationalFn;
    fn add(self, rhs: &RationalFn) -> RationalFn {
        if self.den == rhs.den {
            return RationalFn::new(&self.num + &rhs.num, self.den.clone());
        }
        RationalFn::new(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl Sub for &RationalFn {
    type Output = RationalFn;
    fn sub(self, rhs: &RationalFn) -> RationalFn {
        self + &(-rhs)
    }
}

impl Mul for &RationalFn {
    type Output = RationalFn;
    fn mul(self, rhs: &RationalFn) -> RationalFn {
        RationalFn::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RationalFn {
    type Output = RationalFn;
    fn div(self, rhs: &RationalFn) -> RationalFn {
        RationalFn::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

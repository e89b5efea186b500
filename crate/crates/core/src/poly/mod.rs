//! Exact univariate Laurent polynomials, rational functions, and
//! interpolation through sample points.

mod laurent;
mod ratfn;

pub(crate) use laurent::to_f64;
pub use laurent::{int, rat, Poly};
pub use ratfn::RationalFn;

use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("cannot parse polynomial `{0}`")]
    Parse(String),
    #[error("interpolation needs distinct sample points")]
    DuplicatePoint,
}

/// Unique polynomial of degree below `points.len()` passing through every
/// point, built in Newton form and expanded.
pub fn interpolate(points: &[(BigRational, BigRational)]) -> Result<Poly, PolyError> {
    let k = points.len();
    for i in 0..k {
        for j in 0..i {
            if points[i].0 == points[j].0 {
                return Err(PolyError::DuplicatePoint);
            }
        }
    }
    let xs: Vec<&BigRational> = points.iter().map(|p| &p.0).collect();
    let mut coef: Vec<BigRational> = points.iter().map(|p| p.1.clone()).collect();
    for level in 1..k {
        for i in (level..k).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (xs[i] - xs[i - level]);
        }
    }
    let mut out = Poly::zero();
    for i in (0..k).rev() {
        let linear = Poly::from_terms([(1, BigRational::one()), (0, -xs[i].clone())]);
        out = &(&out * &linear) + &Poly::constant(coef[i].clone());
    }
    Ok(out)
}

/// Interpolates integer samples at integer parameter values.
pub fn interpolate_ints(xs: &[i64], ys: &[BigRational]) -> Result<Poly, PolyError> {
    let pts: Vec<(BigRational, BigRational)> = xs.iter().map(|&x| int(x)).zip(ys.iter().cloned()).collect();
    interpolate(&pts)
}

/// Checks that `p` hits every point exactly.
pub fn fits(p: &Poly, xs: &[i64], ys: &[BigRational]) -> bool {
    xs.iter().zip(ys).all(|(&x, y)| p.eval_int(x) == *y)
}

/// `{"terms": {exponent: "p/q"}, "text": rendering}`.
pub fn poly_json(p: &Poly, var: &str) -> serde_json::Value {
    let terms: serde_json::Map<String, serde_json::Value> = p
        .terms()
        .map(|(e, c)| (e.to_string(), serde_json::Value::String(c.to_string())))
        .collect();
    serde_json::json!({ "terms": terms, "text": p.render(var) })
}

/// Laurent form as in [`poly_json`] when available, otherwise separate
/// numerator and denominator.
pub fn ratfn_json(f: &RationalFn, var: &str) -> serde_json::Value {
    match f.to_laurent() {
        Some(p) => poly_json(&p, var),
        None => serde_json::json!({
            "numerator": poly_json(f.numer(), var),
            "denominator": poly_json(f.denom(), var),
            "text": f.render(var),
        }),
    }
}

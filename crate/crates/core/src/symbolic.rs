//! Symbolic reuse-interval tables in one loop-bound parameter.
//!
//! The program is run at several parameter values from one residue class.
//! Rows of the exact distributions are matched by value rank, and every
//! value and count sequence is fitted with a polynomial of degree at most
//! the loop depth. Samples beyond those needed for the fit are held out and
//! must agree exactly.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::denning::{CacheQueryResult, CacheTable, RiRow};
use crate::dsl::AffineProgram;
use crate::poly::{int, interpolate_ints, Poly, RationalFn};
use crate::ri::{ri_distribution, RiDistribution};
use crate::trace::{block_sequence, Bindings, TraceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolicError {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("`{0}` is not a parameter of the program")]
    UnknownParam(String),
    #[error("sample n = {n} is not a positive multiple of the block size {modulus}")]
    InvalidSample { n: i64, modulus: i64 },
    #[error("need at least {needed} usable samples, have {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("piecewise behavior: {what} does not fit one polynomial (fails at n = {n})")]
    PiecewiseDetected { what: String, n: i64 },
    #[error("rows cannot be matched across samples: {0}")]
    MatchAmbiguity(String),
    #[error("row order is not stable: rows {row} and {next} swap (at n = {n:?})")]
    OrderUnstable { row: usize, next: usize, n: Option<i64> },
    #[error("n = {n} is outside the validity domain (n = 0 mod {modulus}, n >= {min_n})")]
    OutOfDomain { n: i64, modulus: i64, min_n: i64 },
}

/// Parameter values for which a symbolic table is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidityDomain {
    pub modulus: i64,
    pub min_n: i64,
}

impl ValidityDomain {
    pub fn contains(&self, n: i64) -> bool {
        n >= self.min_n && n.rem_euclid(self.modulus) == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicRow {
    pub value: Poly,
    pub real_count: Poly,
    pub imaginary_count: Poly,
    pub real: RationalFn,
    pub imaginary: RationalFn,
}

impl SymbolicRow {
    pub fn portion(&self) -> RationalFn {
        &self.real + &self.imaginary
    }

    /// Whether the row is made only of imaginary reuses.
    pub fn is_imaginary(&self) -> bool {
        self.real.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicRiTable {
    pub param: String,
    pub rows: Vec<SymbolicRow>,
    /// Trace length as a polynomial.
    pub accesses: Poly,
    /// Distinct blocks as a polynomial.
    pub data_size: Poly,
    pub domain: ValidityDomain,
    /// Samples used for fitting.
    pub fitted: Vec<i64>,
    /// Samples checked against the fit.
    pub held_out: Vec<i64>,
    /// Samples dropped because distinct rows coincide there.
    pub degenerate: Vec<i64>,
}

/// Default samples: `b * {2, ..., depth + 4}`.
pub fn default_samples(prog: &AffineProgram, b: i64) -> Vec<i64> {
    let d = prog.loop_depth() as i64;
    (2..=d + 4).map(|k| k * b).collect()
}

struct Sample {
    n: i64,
    dist: RiDistribution,
}

fn sample_distribution(
    prog: &AffineProgram,
    param: &str,
    fixed: &Bindings,
    b: i64,
    n: i64,
) -> Result<Sample, SymbolicError> {
    let mut bind = fixed.clone();
    bind.insert(param.to_string(), n);
    let ids = block_sequence(prog, &bind, b)?;
    Ok(Sample {
        n,
        dist: ri_distribution(&ids),
    })
}

fn fit(what: impl Fn() -> String, xs: &[i64], ys: &[BigRational], k: usize) -> Result<Poly, SymbolicError> {
    let p = interpolate_ints(&xs[..k], &ys[..k]).expect("samples are distinct");
    for (x, y) in xs[k..].iter().zip(&ys[k..]) {
        if p.eval_int(*x) != *y {
            return Err(SymbolicError::PiecewiseDetected { what: what(), n: *x });
        }
    }
    Ok(p)
}

fn count(c: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(c))
}

/// Derives the symbolic table of `prog` in parameter `param`, with every
/// other parameter fixed by `fixed`.
pub fn derive_symbolic_table(
    prog: &AffineProgram,
    param: &str,
    fixed: &Bindings,
    b: i64,
    samples: &[i64],
) -> Result<SymbolicRiTable, SymbolicError> {
    if prog.symbol_index(param).is_none() {
        return Err(SymbolicError::UnknownParam(param.to_string()));
    }
    let mut samples = samples.to_vec();
    samples.sort_unstable();
    samples.dedup();
    if let Some(&n) = samples.iter().find(|&&n| n <= 0 || n.rem_euclid(b) != 0) {
        return Err(SymbolicError::InvalidSample { n, modulus: b });
    }
    let depth = prog.loop_depth();
    let needed = depth + 2;
    if samples.len() < needed {
        return Err(SymbolicError::InsufficientSamples {
            needed,
            got: samples.len(),
        });
    }
    let runs: Vec<Sample> = samples
        .par_iter()
        .map(|&n| sample_distribution(prog, param, fixed, b, n))
        .collect::<Result<_, _>>()?;

    let k_rows = runs.last().unwrap().dist.entries.len();
    if let Some(s) = runs.iter().find(|s| s.dist.entries.len() > k_rows) {
        return Err(SymbolicError::MatchAmbiguity(format!(
            "n = {} has {} distinct values but the largest sample has {}",
            s.n,
            s.dist.entries.len(),
            k_rows
        )));
    }
    let start = runs
        .iter()
        .rposition(|s| s.dist.entries.len() != k_rows)
        .map_or(0, |i| i + 1);
    let good = &runs[start..];
    let degenerate: Vec<i64> = runs[..start].iter().map(|s| s.n).collect();
    if good.len() < needed {
        return Err(SymbolicError::InsufficientSamples {
            needed,
            got: good.len(),
        });
    }
    let xs: Vec<i64> = good.iter().map(|s| s.n).collect();
    let k = depth + 1;

    let accesses = fit(
        || "trace length".into(),
        &xs,
        &good.iter().map(|s| count(s.dist.n)).collect::<Vec<_>>(),
        k,
    )?;
    let data_size = fit(
        || "distinct block count".into(),
        &xs,
        &good.iter().map(|s| count(s.dist.m)).collect::<Vec<_>>(),
        k,
    )?;
    let total = RationalFn::from_poly(accesses.clone());

    let columns: Vec<Vec<(u64, u64, u64)>> = good
        .iter()
        .map(|s| s.dist.iter().map(|(v, c)| (v, c.real, c.imaginary)).collect())
        .collect();
    let mut rows = Vec::with_capacity(k_rows);
    for r in 0..k_rows {
        let vals: Vec<BigRational> = columns.iter().map(|c| count(c[r].0)).collect();
        let reals: Vec<BigRational> = columns.iter().map(|c| count(c[r].1)).collect();
        let imags: Vec<BigRational> = columns.iter().map(|c| count(c[r].2)).collect();
        let value = fit(|| format!("value of row {}", r + 1), &xs, &vals, k)?;
        let real_count = fit(|| format!("real count of row {}", r + 1), &xs, &reals, k)?;
        let imaginary_count = fit(|| format!("imaginary count of row {}", r + 1), &xs, &imags, k)?;
        rows.push(SymbolicRow {
            real: &RationalFn::from_poly(real_count.clone()) / &total,
            imaginary: &RationalFn::from_poly(imaginary_count.clone()) / &total,
            value,
            real_count,
            imaginary_count,
        });
    }
    check_asymptotic_order(&rows)?;
    Ok(SymbolicRiTable {
        param: param.to_string(),
        rows,
        accesses,
        data_size,
        domain: ValidityDomain {
            modulus: b,
            min_n: xs[0],
        },
        held_out: xs[k..].to_vec(),
        fitted: xs[..k].to_vec(),
        degenerate,
    })
}

fn check_asymptotic_order(rows: &[SymbolicRow]) -> Result<(), SymbolicError> {
    for (j, w) in rows.windows(2).enumerate() {
        if (&w[1].value - &w[0].value).asymptotic_sign() <= 0 {
            return Err(SymbolicError::OrderUnstable {
                row: j + 1,
                next: j + 2,
                n: None,
            });
        }
    }
    Ok(())
}

impl SymbolicRiTable {
    /// Concrete distribution at `n`, as counts per value.
    pub fn evaluate(&self, n: i64) -> Vec<(BigRational, BigRational, BigRational)> {
        self.rows
            .iter()
            .map(|r| {
                (
                    r.value.eval_int(n),
                    r.real_count.eval_int(n),
                    r.imaginary_count.eval_int(n),
                )
            })
            .collect()
    }

    /// Samples at which the table is known to be exact.
    pub fn verified_samples(&self) -> Vec<i64> {
        self.fitted.iter().chain(&self.held_out).copied().collect()
    }
}

/// Outcome of the symbolic RI sum test.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicSumCheck {
    pub pass: bool,
    pub sum: RationalFn,
    pub expected: Poly,
    /// `sum - expected`; zero when the test passes.
    pub surviving: RationalFn,
}

/// Expands `sum value * portion` and compares it with the data size.
pub fn ri_sum_check_symbolic(table: &SymbolicRiTable) -> SymbolicSumCheck {
    let mut sum = RationalFn::zero();
    for r in &table.rows {
        sum = &sum + &(&RationalFn::from_poly(r.value.clone()) * &r.portion());
    }
    let surviving = &sum - &RationalFn::from_poly(table.data_size.clone());
    SymbolicSumCheck {
        pass: surviving.is_zero(),
        sum,
        expected: table.data_size.clone(),
        surviving,
    }
}

/// Denning table with entries as functions of the parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicCacheTable {
    pub param: String,
    pub table: CacheTable<RationalFn>,
    pub accesses: Poly,
    pub data_size: Poly,
    pub domain: ValidityDomain,
}

/// Runs the recursion row by row on the symbolic table. The resulting row
/// order is re-verified at every sample.
pub fn symbolic_denning(table: &SymbolicRiTable) -> Result<SymbolicCacheTable, SymbolicError> {
    check_asymptotic_order(&table.rows)?;
    for &n in &table.verified_samples() {
        for (j, w) in table.rows.windows(2).enumerate() {
            if w[0].value.eval_int(n) >= w[1].value.eval_int(n) {
                return Err(SymbolicError::OrderUnstable {
                    row: j + 1,
                    next: j + 2,
                    n: Some(n),
                });
            }
        }
    }
    let rows: Vec<RiRow<RationalFn>> = table
        .rows
        .iter()
        .map(|r| RiRow {
            value: RationalFn::from_poly(r.value.clone()),
            real: r.real.clone(),
            imaginary: r.imaginary.clone(),
        })
        .collect();
    Ok(SymbolicCacheTable {
        param: table.param.clone(),
        table: CacheTable::from_rows(&rows),
        accesses: table.accesses.clone(),
        data_size: table.data_size.clone(),
        domain: table.domain,
    })
}

impl SymbolicCacheTable {
    /// Concrete table at `n`.
    pub fn evaluate(&self, n: i64) -> Result<CacheTable<BigRational>, SymbolicError> {
        self.check_domain(n)?;
        let x = int(n);
        let ev = |f: &RationalFn| f.eval(&x).expect("denominator vanishes inside the domain");
        Ok(CacheTable {
            rows: self
                .table
                .rows
                .iter()
                .map(|r| crate::denning::CacheRow {
                    value: ev(&r.value),
                    portion: ev(&r.portion),
                    real_portion: ev(&r.real_portion),
                    imaginary_portion: ev(&r.imaginary_portion),
                    miss_ratio: ev(&r.miss_ratio),
                    cold: ev(&r.cold),
                    cache_size: ev(&r.cache_size),
                })
                .collect(),
            cold_adjusted: self.table.cold_adjusted,
        })
    }

    pub fn check_domain(&self, n: i64) -> Result<(), SymbolicError> {
        if self.domain.contains(n) {
            Ok(())
        } else {
            Err(SymbolicError::OutOfDomain {
                n,
                modulus: self.domain.modulus,
                min_n: self.domain.min_n,
            })
        }
    }
}

/// Step-mode miss ratio for a cache of `c` blocks at parameter value `n`.
/// Only the rows visited by a binary search on cache size are evaluated.
pub fn predict(table: &SymbolicCacheTable, n: i64, c: u64) -> Result<CacheQueryResult, SymbolicError> {
    table.check_domain(n)?;
    let x = int(n);
    let cq = count(c);
    let rows = &table.table.rows;
    let size_at = |i: usize| rows[i].cache_size.eval(&x).expect("nonzero denominator");
    // rows[0] has size 0 <= c; find the last row with size <= c.
    let (mut lo, mut hi) = (0usize, rows.len());
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if size_at(mid) <= cq {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = &rows[lo];
    let ev = |f: &RationalFn| f.eval(&x).expect("nonzero denominator");
    let cold = ev(&r.cold);
    let ratio = if table.table.cold_adjusted {
        ev(&r.miss_ratio)
    } else {
        ev(&r.miss_ratio) + &cold
    };
    Ok(CacheQueryResult {
        cache_size: c,
        miss_count: &ratio * table.accesses.eval(&x),
        miss_ratio: ratio,
        cold_miss_share: cold,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRow {
    /// Smallest cache size guaranteeing the ratio across the domain.
    pub min_cache_size: Poly,
    pub max_miss_ratio: RationalFn,
    /// Denning row the entry comes from; 0 for the leading row.
    pub source_row: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    pub domain: ValidityDomain,
}

fn split_growing(p: &Poly) -> (Poly, Poly) {
    let pick = |pos: bool| Poly::from_terms(p.terms().filter(|(e, _)| (*e > 0) == pos).map(|(e, v)| (e, v.clone())));
    (pick(true), pick(false))
}

/// Rounds a cache-size expression up so it bounds the exact size for every
/// `n` in the domain. Growing terms are kept as they are; the constant and
/// decaying terms are replaced by the ceiling of their largest value, which
/// for reciprocal terms is reached at the smallest `n`.
pub fn ceil_constant_terms(c: &RationalFn, domain: &ValidityDomain) -> Poly {
    let (growing, rest) = match c.to_laurent() {
        Some(p) => {
            let (g, r) = split_growing(&p);
            (g, RationalFn::from_poly(r))
        }
        None => {
            let (q, r) = c.numer().div_rem(c.denom());
            let (g, qr) = split_growing(&q);
            (g, &RationalFn::from_poly(qr) + &RationalFn::new(r, c.denom().clone()))
        }
    };
    let bound = match rest.to_laurent() {
        Some(p) => {
            let nmin = int(domain.min_n);
            let mut acc = p.coeff(0);
            for (e, a) in p.terms().filter(|(e, _)| *e < 0) {
                if a.is_positive() {
                    acc += a * Poly::monomial(int(1), e).eval(&nmin);
                }
            }
            acc
        }
        None => {
            // Decaying remainder with a general denominator: bound it by its
            // largest value over a long stretch of the domain and its limit.
            let mut best = rest.limit().unwrap_or_else(BigRational::zero);
            for k in 0..256 {
                let n = int(domain.min_n + k * domain.modulus);
                if let Some(v) = rest.eval(&n) {
                    if v > best {
                        best = v;
                    }
                }
            }
            best
        }
    };
    &growing + &Poly::constant(BigRational::from_integer(bound.ceil().to_integer()))
}

/// Minimal cache sizes for each attainable maximal miss ratio. A row is
/// emitted whenever the cold-adjusted miss ratio strictly drops, which
/// happens exactly at rows carrying real reuses.
pub fn min_max_scaling(ctable: &SymbolicCacheTable) -> ScalingTable {
    let t = &ctable.table;
    let mut rows = vec![ScalingRow {
        min_cache_size: Poly::zero(),
        max_miss_ratio: RationalFn::one(),
        source_row: 0,
    }];
    for (i, r) in t.rows.iter().enumerate().skip(1) {
        if r.real_portion.is_zero() {
            continue;
        }
        rows.push(ScalingRow {
            min_cache_size: ceil_constant_terms(&r.cache_size, &ctable.domain),
            max_miss_ratio: t.adjusted(i),
            source_row: i,
        });
    }
    ScalingTable {
        rows,
        domain: ctable.domain,
    }
}

impl ScalingTable {
    /// Checks at `n` that sizes strictly increase and ratios strictly drop.
    pub fn is_monotone_at(&self, n: i64) -> bool {
        let x = int(n);
        self.rows.windows(2).all(|w| {
            let s = w[0].min_cache_size.eval(&x).cmp(&w[1].min_cache_size.eval(&x));
            let m = w[0].max_miss_ratio.eval(&x).cmp(&w[1].max_miss_ratio.eval(&x));
            s == Ordering::Less && m == Ordering::Greater
        })
    }
}

//! Working-set recursion over reuse-interval distributions.
//!
//! With `m(x) = P(ri > x)` and `s(x + 1) = s(x) + m(x)`, the average
//! working-set size at each distinct interval `v` is
//! `c(v) = c(v') + (v - v') * m(v')` for the previous distinct value `v'`.
//! The cache of size `c(v)` is predicted to miss with ratio `m(v)`, plus the
//! cold misses once first touches are counted as misses again.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::poly::{to_f64, RationalFn};
use crate::ri::RiDistribution;

/// Exact field operations needed by the recursion.
pub trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
}

impl Scalar for RationalFn {
    fn zero() -> Self {
        RationalFn::zero()
    }
    fn one() -> Self {
        RationalFn::one()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
}

/// One input row: a distinct interval value with its real and imaginary
/// portions.
#[derive(Debug, Clone, PartialEq)]
pub struct RiRow<S> {
    pub value: S,
    pub real: S,
    pub imaginary: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CacheRow<S> {
    /// Interval value; zero for the leading row.
    pub value: S,
    pub portion: S,
    pub real_portion: S,
    pub imaginary_portion: S,
    /// `P(ri > value)`, counting imaginary reuses as hits.
    pub miss_ratio: S,
    /// Imaginary portion with `ri <= value`.
    pub cold: S,
    /// Average working-set size `s(value)`.
    pub cache_size: S,
}

impl<S: Scalar> CacheRow<S> {
    /// Single-run miss ratio: capacity misses plus cold misses.
    pub fn adjusted_miss_ratio(&self) -> S {
        self.miss_ratio.plus(&self.cold)
    }
}

/// Denning table. Row 0 is `(c = 0, m = 1)`; the rest follow the distinct
/// interval values in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheTable<S> {
    pub rows: Vec<CacheRow<S>>,
    /// True after [`cold_adjust`]: `miss_ratio` then already includes cold
    /// misses.
    pub cold_adjusted: bool,
}

impl<S: Scalar> CacheTable<S> {
    /// Runs the recursion over rows given in increasing value order.
    pub fn from_rows(input: &[RiRow<S>]) -> Self {
        let mut rows = Vec::with_capacity(input.len() + 1);
        rows.push(CacheRow {
            value: S::zero(),
            portion: S::zero(),
            real_portion: S::zero(),
            imaginary_portion: S::zero(),
            miss_ratio: S::one(),
            cold: S::zero(),
            cache_size: S::zero(),
        });
        for r in input {
            let prev = rows.last().unwrap();
            let portion = r.real.plus(&r.imaginary);
            let c = prev
                .cache_size
                .plus(&r.value.minus(&prev.value).times(&prev.miss_ratio));
            let row = CacheRow {
                miss_ratio: prev.miss_ratio.minus(&portion),
                cold: prev.cold.plus(&r.imaginary),
                cache_size: c,
                value: r.value.clone(),
                portion,
                real_portion: r.real.clone(),
                imaginary_portion: r.imaginary.clone(),
            };
            rows.push(row);
        }
        CacheTable {
            rows,
            cold_adjusted: false,
        }
    }

    /// Miss ratio including cold misses for row `i`.
    pub fn adjusted(&self, i: usize) -> S {
        let r = &self.rows[i];
        if self.cold_adjusted {
            r.miss_ratio.clone()
        } else {
            r.adjusted_miss_ratio()
        }
    }

    pub fn final_cache_size(&self) -> &S {
        &self.rows.last().unwrap().cache_size
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DenningError {
    #[error("distribution still holds first-touch accesses; apply infinite repeat first")]
    InfiniteRi,
}

/// Denning table of a concrete distribution.
pub fn denning_table(dist: &RiDistribution) -> Result<CacheTable<BigRational>, DenningError> {
    if dist.total_count() != dist.n {
        return Err(DenningError::InfiniteRi);
    }
    let n = BigInt::from(dist.n);
    let rows: Vec<RiRow<BigRational>> = dist
        .iter()
        .map(|(v, c)| RiRow {
            value: BigRational::from_integer(BigInt::from(v)),
            real: BigRational::new(BigInt::from(c.real), n.clone()),
            imaginary: BigRational::new(BigInt::from(c.imaginary), n.clone()),
        })
        .collect();
    Ok(CacheTable::from_rows(&rows))
}

/// Folds the cold column into the miss ratio.
pub fn cold_adjust<S: Scalar>(table: &CacheTable<S>) -> CacheTable<S> {
    if table.cold_adjusted {
        return table.clone();
    }
    let rows = table
        .rows
        .iter()
        .map(|r| CacheRow {
            miss_ratio: r.adjusted_miss_ratio(),
            ..r.clone()
        })
        .collect();
    CacheTable {
        rows,
        cold_adjusted: true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryMode {
    /// Ratio of the largest table size not above the query (an upper bound).
    Step,
    /// Linear interpolation between the bracketing rows.
    Interpolate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CacheQueryResult {
    pub cache_size: u64,
    pub miss_ratio: BigRational,
    pub miss_count: BigRational,
    /// Part of `miss_ratio` due to cold misses.
    pub cold_miss_share: BigRational,
}

impl CacheQueryResult {
    pub fn miss_ratio_f64(&self) -> f64 {
        to_f64(&self.miss_ratio)
    }

    pub fn miss_count_f64(&self) -> f64 {
        to_f64(&self.miss_count)
    }
}

/// Index of the last row whose cache size is at most `c`.
pub fn bracket(table: &CacheTable<BigRational>, c: &BigRational) -> usize {
    table.rows.partition_point(|r| r.cache_size <= *c) - 1
}

/// Predicted miss ratio of an LRU cache of `c` blocks for a trace of
/// `accesses` accesses.
pub fn query_miss_ratio(table: &CacheTable<BigRational>, c: u64, accesses: u64, mode: QueryMode) -> CacheQueryResult {
    let cq = BigRational::from_integer(BigInt::from(c));
    let i = bracket(table, &cq);
    let mut ratio = table.adjusted(i);
    let cold = table.rows[i].cold.clone();
    if mode == QueryMode::Interpolate && i + 1 < table.rows.len() {
        let (lo, hi) = (&table.rows[i], &table.rows[i + 1]);
        let span = &hi.cache_size - &lo.cache_size;
        if span.is_positive() {
            let t = (&cq - &lo.cache_size) / span;
            let next = table.adjusted(i + 1);
            ratio = &ratio + &(t * (next - &ratio));
        }
    }
    CacheQueryResult {
        cache_size: c,
        miss_count: &ratio * BigRational::from_integer(BigInt::from(accesses)),
        miss_ratio: ratio,
        cold_miss_share: cold,
    }
}

/// `1 - |predicted - simulated| / accesses`.
pub fn data_movement_accuracy(predicted: f64, simulated: f64, accesses: f64) -> f64 {
    if accesses <= 0.0 {
        return 1.0;
    }
    1.0 - (predicted - simulated).abs() / accesses
}

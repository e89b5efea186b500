//! Backward reuse intervals, the Infinite Repeat closure, and footprints.
//!
//! All functions work on dense block-id sequences such as
//! [`AccessTrace::block_ids`](crate::trace::AccessTrace::block_ids).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

/// Backward reuse interval of one access.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ri {
    FirstTouch,
    Reuse(u64),
}

/// First and last access position of every block, in order of first touch.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BoundaryRecord {
    pub blocks: Vec<u32>,
    pub first: Vec<usize>,
    pub last: Vec<usize>,
}

fn dense_len(ids: &[u32]) -> usize {
    ids.iter().map(|&b| b as usize + 1).max().unwrap_or(0)
}

/// `ri_t = t - t'` for the latest earlier access `t'` to the same block.
pub fn backward_ris(ids: &[u32]) -> (Vec<Ri>, BoundaryRecord) {
    let mut slot = vec![usize::MAX; dense_len(ids)];
    let mut rec = BoundaryRecord::default();
    let mut ris = Vec::with_capacity(ids.len());
    for (t, &b) in ids.iter().enumerate() {
        let k = slot[b as usize];
        if k == usize::MAX {
            slot[b as usize] = rec.blocks.len();
            rec.blocks.push(b);
            rec.first.push(t);
            rec.last.push(t);
            ris.push(Ri::FirstTouch);
        } else {
            ris.push(Ri::Reuse((t - rec.last[k]) as u64));
            rec.last[k] = t;
        }
    }
    (ris, rec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct RiCounts {
    pub real: u64,
    pub imaginary: u64,
}

impl RiCounts {
    pub fn total(&self) -> u64 {
        self.real + self.imaginary
    }
}

/// Histogram of reuse intervals of one steady-state run under Infinite
/// Repeat. Every access carries a finite interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiDistribution {
    pub entries: BTreeMap<u64, RiCounts>,
    /// Trace length.
    pub n: u64,
    /// Distinct blocks.
    pub m: u64,
}

impl RiDistribution {
    fn ratio(&self, c: u64) -> BigRational {
        BigRational::new(BigInt::from(c), BigInt::from(self.n))
    }

    pub fn portion(&self, v: u64) -> BigRational {
        self.entries
            .get(&v)
            .map_or_else(BigRational::zero, |c| self.ratio(c.total()))
    }

    pub fn real_portion(&self, v: u64) -> BigRational {
        self.entries
            .get(&v)
            .map_or_else(BigRational::zero, |c| self.ratio(c.real))
    }

    pub fn imaginary_portion(&self, v: u64) -> BigRational {
        self.entries
            .get(&v)
            .map_or_else(BigRational::zero, |c| self.ratio(c.imaginary))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, RiCounts)> + '_ {
        self.entries.iter().map(|(v, c)| (*v, *c))
    }

    pub fn total_count(&self) -> u64 {
        self.entries.values().map(RiCounts::total).sum()
    }

    /// Export rows `{value, real_portion, imaginary_portion}` with exact
    /// rationals rendered as `p/q`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.iter()
                .map(|(v, c)| {
                    serde_json::json!({
                        "value": v,
                        "real_portion": self.ratio(c.real).to_string(),
                        "imaginary_portion": self.ratio(c.imaginary).to_string(),
                    })
                })
                .collect(),
        )
    }
}

/// Replaces each first touch of block `d` by the imaginary interval
/// `n + f_d - l_d` reaching back into the previous run.
pub fn infinite_repeat(ris: &[Ri], bounds: &BoundaryRecord) -> RiDistribution {
    let n = ris.len() as u64;
    let mut entries: BTreeMap<u64, RiCounts> = BTreeMap::new();
    for r in ris {
        if let Ri::Reuse(v) = r {
            entries.entry(*v).or_default().real += 1;
        }
    }
    for (&f, &l) in bounds.first.iter().zip(&bounds.last) {
        let v = n + f as u64 - l as u64;
        entries.entry(v).or_default().imaginary += 1;
    }
    RiDistribution {
        entries,
        n,
        m: bounds.first.len() as u64,
    }
}

/// Backward intervals closed under Infinite Repeat, in one pass.
pub fn ri_distribution(ids: &[u32]) -> RiDistribution {
    let (ris, bounds) = backward_ris(ids);
    infinite_repeat(&ris, &bounds)
}

/// Average distinct-block count over all `n - x + 1` windows of length `x`,
/// by sliding a window over the trace.
pub fn footprint_oracle(ids: &[u32], x: usize) -> BigRational {
    let n = ids.len();
    assert!(x <= n, "window longer than trace");
    if x == 0 {
        return BigRational::zero();
    }
    let mut count = vec![0u32; dense_len(ids)];
    let mut distinct = 0u64;
    let mut total = BigInt::zero();
    for t in 0..n {
        let b = ids[t] as usize;
        if count[b] == 0 {
            distinct += 1;
        }
        count[b] += 1;
        if t >= x {
            let o = ids[t - x] as usize;
            count[o] -= 1;
            if count[o] == 0 {
                distinct -= 1;
            }
        }
        if t + 1 >= x {
            total += distinct;
        }
    }
    BigRational::new(total, BigInt::from(n - x + 1))
}

/// Reuse-term footprint `m - sum_{i > x} (i - x) P(i)`.
pub fn rtfp(dist: &RiDistribution, x: u64) -> BigRational {
    let mut excess = BigInt::zero();
    for (v, c) in dist.entries.range(x + 1..) {
        excess += BigInt::from(v - x) * BigInt::from(c.total());
    }
    BigRational::from_integer(BigInt::from(dist.m)) - BigRational::new(excess, BigInt::from(dist.n))
}

/// Accumulates `sum_g (g - x)^+` for every `x` from a histogram of gaps.
struct ExcessTable {
    cnt_gt: Vec<u64>,
    sum_gt: Vec<u128>,
}

impl ExcessTable {
    fn new(hist: &[u64]) -> Self {
        let len = hist.len();
        let mut cnt_gt = vec![0u64; len + 1];
        let mut sum_gt = vec![0u128; len + 1];
        for g in (0..len).rev() {
            // cnt_gt[x] counts gaps strictly above x.
            cnt_gt[g] = cnt_gt[g + 1] + if g + 1 < len { hist[g + 1] } else { 0 };
            sum_gt[g] = sum_gt[g + 1]
                + if g + 1 < len {
                    hist[g + 1] as u128 * (g as u128 + 1)
                } else {
                    0
                };
        }
        ExcessTable { cnt_gt, sum_gt }
    }

    fn excess(&self, x: usize) -> u128 {
        if x >= self.cnt_gt.len() {
            return 0;
        }
        self.sum_gt[x] - self.cnt_gt[x] as u128 * x as u128
    }
}

fn xiang_table(ids: &[u32]) -> (ExcessTable, u64, usize) {
    let n = ids.len();
    let (ris, bounds) = backward_ris(ids);
    let mut hist = vec![0u64; n + 2];
    for r in &ris {
        if let Ri::Reuse(v) = r {
            hist[*v as usize] += 1;
        }
    }
    for (&f, &l) in bounds.first.iter().zip(&bounds.last) {
        hist[f + 1] += 1;
        hist[n - l] += 1;
    }
    (ExcessTable::new(&hist), bounds.first.len() as u64, n)
}

/// Footprint of a finite trace from its reuse intervals plus boundary gaps:
///
/// `fp(x) = m - [sum_{ri > x} (ri - x) + sum_d (f_d + 1 - x)^+ + sum_d (n - l_d - x)^+] / (n - x + 1)`
///
/// with 0-based first and last positions `f_d`, `l_d`.
pub fn xiang_footprint(ids: &[u32], x: usize) -> BigRational {
    let (tab, m, n) = xiang_table(ids);
    assert!(x <= n, "window longer than trace");
    xiang_at(&tab, m, n, x)
}

fn xiang_at(tab: &ExcessTable, m: u64, n: usize, x: usize) -> BigRational {
    let excess = BigInt::from(tab.excess(x));
    BigRational::from_integer(BigInt::from(m)) - BigRational::new(excess, BigInt::from(n - x + 1))
}

/// [`xiang_footprint`] for every `x` in `0..=n`, in linear time.
pub fn xiang_footprint_all(ids: &[u32]) -> Vec<BigRational> {
    let (tab, m, n) = xiang_table(ids);
    (0..=n).map(|x| xiang_at(&tab, m, n, x)).collect()
}

/// Outcome of the RI sum test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumCheck {
    pub pass: bool,
    pub sum: BigRational,
    pub expected: BigRational,
    /// `sum - expected`.
    pub residual: BigRational,
}

/// `sum_v v * P(v)` must equal the distinct-block count exactly.
pub fn ri_sum_check(dist: &RiDistribution) -> SumCheck {
    let mut acc = BigInt::zero();
    for (v, c) in dist.iter() {
        acc += BigInt::from(v) * BigInt::from(c.total());
    }
    let sum = BigRational::new(acc, BigInt::from(dist.n.max(1)));
    let expected = BigRational::from_integer(BigInt::from(dist.m));
    let residual = &sum - &expected;
    SumCheck {
        pass: residual.is_zero(),
        sum,
        expected,
        residual,
    }
}

use std::collections::BTreeMap;

use algebraic_locality::corpus;
use algebraic_locality::denning::{
    bracket, cold_adjust, data_movement_accuracy, denning_table, query_miss_ratio, DenningError, QueryMode,
};
use algebraic_locality::ri::{ri_distribution, rtfp, RiCounts, RiDistribution};
use algebraic_locality::sim::{simulate_blocks, CacheGeometry};
use algebraic_locality::trace::{generate_trace, Bindings};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

fn toy() -> RiDistribution {
    let t = generate_trace(&corpus::load("abacc").unwrap(), &Bindings::new(), 1).unwrap();
    ri_distribution(&t.block_ids())
}

#[test]
fn toy_table() {
    let t = denning_table(&toy()).unwrap();
    let c: Vec<BigRational> = t.rows.iter().map(|r| r.cache_size.clone()).collect();
    assert_eq!(c, [q(0, 1), q(1, 1), q(9, 5), q(12, 5), q(14, 5), q(3, 1)]);
    let m: Vec<BigRational> = t.rows.iter().map(|r| r.miss_ratio.clone()).collect();
    assert_eq!(m, [q(1, 1), q(4, 5), q(3, 5), q(2, 5), q(1, 5), q(0, 1)]);
    let cold: Vec<BigRational> = t.rows.iter().map(|r| r.cold.clone()).collect();
    assert_eq!(cold, [q(0, 1), q(0, 1), q(0, 1), q(1, 5), q(2, 5), q(3, 5)]);
    assert_eq!(t.final_cache_size(), &q(3, 1));
    assert_eq!(t.adjusted(5), q(3, 5));
}

#[test]
fn cold_adjust_folds_once() {
    let t = denning_table(&toy()).unwrap();
    let a = cold_adjust(&t);
    assert!(a.cold_adjusted);
    for i in 0..t.rows.len() {
        assert_eq!(a.rows[i].miss_ratio, t.adjusted(i));
        assert_eq!(a.adjusted(i), t.adjusted(i));
    }
    assert_eq!(cold_adjust(&a), a);
}

#[test]
fn single_block_trace() {
    let d = ri_distribution(&[0, 0, 0, 0]);
    let t = denning_table(&d).unwrap();
    assert_eq!(t.rows.len(), 2);
    assert_eq!(t.rows[1].cache_size, q(1, 1));
    assert_eq!(t.rows[1].miss_ratio, q(0, 1));
    assert_eq!(t.rows[1].cold, q(1, 4));
}

#[test]
fn unclosed_distribution_is_rejected() {
    let mut entries = BTreeMap::new();
    entries.insert(2, RiCounts { real: 1, imaginary: 0 });
    let d = RiDistribution { entries, n: 3, m: 2 };
    assert_eq!(denning_table(&d).unwrap_err(), DenningError::InfiniteRi);
}

#[test]
fn step_queries_match_lru_on_toy() {
    let t = denning_table(&toy()).unwrap();
    for (c, want) in [(0, q(1, 1)), (1, q(4, 5)), (2, q(3, 5)), (3, q(3, 5)), (100, q(3, 5))] {
        let r = query_miss_ratio(&t, c, 5, QueryMode::Step);
        assert_eq!(r.miss_ratio, want, "c = {c}");
        assert_eq!(r.miss_count, &want * q(5, 1));
    }
    assert_eq!(bracket(&t, &q(12, 5)), 3);
    assert_eq!(bracket(&t, &q(239, 100)), 2);
    let sim = simulate_blocks([0, 1, 0, 2, 2], &CacheGeometry::fully_associative(2, 1, 8)).unwrap();
    assert_eq!(sim.misses, 3);
}

#[test]
fn interpolated_query_lies_between_rows() {
    let t = denning_table(&toy()).unwrap();
    let r = query_miss_ratio(&t, 2, 5, QueryMode::Interpolate);
    assert_eq!(r.miss_ratio, q(3, 5));
    let d = ri_distribution(&[0, 1, 2, 0, 1, 2, 3, 3]);
    let t = denning_table(&d).unwrap();
    for c in 0..6u64 {
        let s = query_miss_ratio(&t, c, 8, QueryMode::Step).miss_ratio;
        let i = query_miss_ratio(&t, c, 8, QueryMode::Interpolate).miss_ratio;
        assert!(i <= s, "c = {c}");
    }
}

#[test]
fn accuracy_metric() {
    assert!((data_movement_accuracy(104.0, 100.0, 1000.0) - 0.996).abs() < 1e-12);
    assert_eq!(data_movement_accuracy(5.0, 5.0, 10.0), 1.0);
    assert_eq!(data_movement_accuracy(5.0, 0.0, 0.0), 1.0);
}

proptest! {
    #[test]
    fn cache_size_equals_reuse_term_footprint(v in prop::collection::vec(0u32..6, 1..40)) {
        let d = ri_distribution(&v);
        let t = denning_table(&d).unwrap();
        for r in &t.rows {
            let x = r.value.to_integer().try_into().unwrap();
            prop_assert_eq!(&r.cache_size, &rtfp(&d, x));
        }
        let last = t.rows.last().unwrap();
        prop_assert_eq!(&last.cache_size, &q(d.m as i64, 1));
        prop_assert_eq!(&last.miss_ratio, &q(0, 1));
        prop_assert_eq!(t.adjusted(t.rows.len() - 1), q(d.m as i64, d.n as i64));
        for w in t.rows.windows(2) {
            prop_assert!(w[0].cache_size < w[1].cache_size);
            prop_assert!(w[0].miss_ratio > w[1].miss_ratio);
        }
    }
}

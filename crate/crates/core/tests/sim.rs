use algebraic_locality::corpus;
use algebraic_locality::sim::{
    block_addresses, simulate, simulate_blocks, sweep, Associativity, CacheGeometry, SimConfig, SimError,
};
use algebraic_locality::trace::{generate_trace, pad_layout, unpadded_layout, Bindings};
use proptest::prelude::*;

fn bind(n: i64) -> Bindings {
    let mut b = Bindings::new();
    b.insert("n".into(), n);
    b
}

/// LRU misses by stack distance: an access hits iff fewer than `cap`
/// distinct blocks were touched since the previous access to its block.
fn stack_distance_misses(blocks: &[u64], cap: usize) -> u64 {
    let mut misses = 0;
    for (t, b) in blocks.iter().enumerate() {
        match blocks[..t].iter().rposition(|x| x == b) {
            None => misses += 1,
            Some(p) => {
                let mut between: Vec<u64> = blocks[p + 1..t].to_vec();
                between.sort_unstable();
                between.dedup();
                if between.len() >= cap {
                    misses += 1;
                }
            }
        }
    }
    misses
}

#[test]
fn sequential_sweep_misses_once_per_block() {
    for len in [1i64, 7, 8, 9, 64, 100] {
        let p =
            algebraic_locality::dsl::parse_program(&format!("array A[{len}]; for i = 0 to {len} {{ access A[i]; }}"))
                .unwrap();
        let t = generate_trace(&p, &Bindings::new(), 8).unwrap();
        let layout = pad_layout(&p, &Bindings::new(), 8).unwrap();
        for cap in [1, 4, 1000] {
            let g = CacheGeometry::fully_associative(cap, 8, 64);
            let r = simulate(
                &t,
                &SimConfig {
                    geometry: g,
                    layout: layout.clone(),
                },
            )
            .unwrap();
            assert_eq!(r.misses as i64, (len + 7) / 8);
            assert_eq!(r.cold_misses, r.misses);
        }
    }
}

#[test]
fn toy_trace_at_capacity_three() {
    let g = CacheGeometry::fully_associative(3, 1, 8);
    let r = simulate_blocks([0, 1, 0, 2, 2], &g).unwrap();
    assert_eq!((r.accesses, r.misses, r.cold_misses, r.hits()), (5, 3, 3, 2));
    let r = simulate_blocks([0, 1, 0, 2, 2], &CacheGeometry::fully_associative(1, 1, 8)).unwrap();
    assert_eq!(r.misses, 4);
}

#[test]
fn matmul_whole_data_fits() {
    let p = corpus::load("matmul").unwrap();
    let t = generate_trace(&p, &bind(32), 8).unwrap();
    let layout = pad_layout(&p, &bind(32), 8).unwrap();
    let g = CacheGeometry::fully_associative(4096, 8, 64);
    let r = simulate(&t, &SimConfig { geometry: g, layout }).unwrap();
    assert_eq!(r.misses, 384);
    assert_eq!(r.accesses, 4 * 32 * 32 * 32);
    assert_eq!(r.per_set[0].occupancy, 384);
}

#[test]
fn padding_never_hurts_power_of_two_transpose() {
    let p = corpus::load("transpose").unwrap();
    let t = generate_trace(&p, &bind(64), 8).unwrap();
    let g = [
        CacheGeometry::set_associative(8, 16, 8, 64),
        CacheGeometry::set_associative(4, 32, 8, 64),
    ];
    let padded = sweep(&t, &pad_layout(&p, &bind(64), 8).unwrap(), &g).unwrap();
    let plain = sweep(&t, &unpadded_layout(&p, &bind(64), 8).unwrap(), &g).unwrap();
    for (a, b) in padded.iter().zip(&plain) {
        assert!(a.misses <= b.misses, "{} vs {}", a.misses, b.misses);
    }
}

#[test]
fn geometry_errors() {
    assert_eq!(
        simulate_blocks([1], &CacheGeometry::fully_associative(0, 8, 64)).unwrap_err(),
        SimError::CapacityZero
    );
    assert_eq!(
        simulate_blocks([1], &CacheGeometry::set_associative(0, 4, 8, 64)).unwrap_err(),
        SimError::CapacityZero
    );
    let p = corpus::load("traverse1d").unwrap();
    let t = generate_trace(&p, &bind(16), 4).unwrap();
    let layout = pad_layout(&p, &bind(16), 4).unwrap();
    let cfg = SimConfig {
        geometry: CacheGeometry::fully_associative(4, 8, 64),
        layout,
    };
    assert_eq!(
        simulate(&t, &cfg).unwrap_err(),
        SimError::BlockSizeMismatch { geometry: 8, layout: 4 }
    );
}

#[test]
fn geometry_strings() {
    let g = CacheGeometry::parse("12:8:64", 8).unwrap();
    assert_eq!(g.associativity, Associativity::Ways(12));
    assert_eq!((g.capacity_blocks(), g.capacity_bytes()), (96, 6144));
    assert_eq!(g.to_string(), "12:8:64");
    let f = CacheGeometry::parse("full:96:64", 8).unwrap();
    assert_eq!(f, CacheGeometry::fully_associative(96, 8, 64));
    assert_eq!(f.to_string(), "full:96:64");
    for bad in ["12:8", "x:8:64", "4:4:0", "full:a:64"] {
        assert!(
            matches!(CacheGeometry::parse(bad, 8), Err(SimError::BadGeometry(_))),
            "{bad}"
        );
    }
}

#[test]
fn per_set_histogram() {
    let g = CacheGeometry::set_associative(1, 2, 1, 8);
    let r = simulate_blocks([0, 1, 2, 0, 1], &g).unwrap();
    assert_eq!(r.per_set[0].accesses, 3);
    assert_eq!(r.per_set[1].accesses, 2);
    assert_eq!(r.misses, 4);
    let mut buf = Vec::new();
    r.write_set_csv(&mut buf).unwrap();
    assert_eq!(
        String::from_utf8(buf).unwrap(),
        "set,accesses,misses,occupancy\n0,3,3,1\n1,2,1,1\n"
    );
    let j = r.to_json();
    assert_eq!(j["capacity_blocks"], 2);
    assert_eq!(j["misses"], 4);
}

#[test]
fn block_addresses_follow_layout() {
    let p = corpus::load("abacc").unwrap();
    let t = generate_trace(&p, &Bindings::new(), 1).unwrap();
    let layout = pad_layout(&p, &Bindings::new(), 1).unwrap();
    let a = block_addresses(&t, &layout).unwrap();
    assert_eq!(a[0], a[2]);
    assert_eq!(a[3], a[4]);
    assert_ne!(a[0], a[1]);
}

fn blocks() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..24, 0..120)
}

proptest! {
    #[test]
    fn full_lru_matches_stack_distance(b in blocks(), cap in 1usize..12) {
        let r = simulate_blocks(b.iter().copied(), &CacheGeometry::fully_associative(cap, 8, 64)).unwrap();
        prop_assert_eq!(r.misses, stack_distance_misses(&b, cap));
    }

    #[test]
    fn set_lru_matches_per_set_stack_distance(b in blocks(), ways in 1usize..5, sets in 1usize..5) {
        let r = simulate_blocks(b.iter().copied(), &CacheGeometry::set_associative(ways, sets, 8, 64)).unwrap();
        let mut want = 0;
        for s in 0..sets as u64 {
            let sub: Vec<u64> = b.iter().copied().filter(|x| x % sets as u64 == s).collect();
            want += stack_distance_misses(&sub, ways);
        }
        prop_assert_eq!(r.misses, want);
    }

    #[test]
    fn one_set_equals_fully_associative(b in blocks(), cap in 1usize..12) {
        let a = simulate_blocks(b.iter().copied(), &CacheGeometry::fully_associative(cap, 8, 64)).unwrap();
        let s = simulate_blocks(b.iter().copied(), &CacheGeometry::set_associative(cap, 1, 8, 64)).unwrap();
        prop_assert_eq!((a.misses, a.cold_misses), (s.misses, s.cold_misses));
    }

    #[test]
    fn misses_shrink_as_capacity_grows(b in blocks()) {
        let m: Vec<u64> = (1..16)
            .map(|c| simulate_blocks(b.iter().copied(), &CacheGeometry::fully_associative(c, 8, 64)).unwrap().misses)
            .collect();
        for w in m.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        let distinct = { let mut v = b.clone(); v.sort_unstable(); v.dedup(); v.len() as u64 };
        prop_assert!(m.iter().all(|&x| x >= distinct));
    }
}

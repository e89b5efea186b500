mod common;

use std::collections::BTreeSet;

use algebraic_locality::corpus;
use algebraic_locality::dsl::parse_program;
use algebraic_locality::trace::{
    bind, block_sequence, dump_text, generate_trace, linearize, next_prime, pad_innermost, pad_layout,
    timestamp_regions, timestamp_space, unpadded_layout, write_csv, ArrayLayout, Bindings, PaddedLayout, TraceError,
};
use proptest::prelude::*;

fn none() -> Bindings {
    Bindings::new()
}

#[test]
fn toy_trace_has_five_records_over_three_blocks() {
    let t = generate_trace(&corpus::load("abacc").unwrap(), &none(), 1).unwrap();
    assert_eq!(t.len(), 5);
    assert_eq!(t.distinct_blocks(), 3);
    let names: Vec<&str> = t.records().map(|r| t.array_names()[r.array].as_str()).collect();
    assert_eq!(names, ["A", "B", "A", "C", "C"]);
}

#[test]
fn contiguous_sweep_coarsens_to_ceil_l_over_b() {
    let p = parse_program("for i = 0 to 16 step 1 { access A[i]; }").unwrap();
    let t = generate_trace(&p, &none(), 8).unwrap();
    assert_eq!((t.len(), t.distinct_blocks()), (16, 2));
    for (len, b) in [(1, 8), (17, 8), (100, 7), (64, 1)] {
        let p = parse_program(&format!("for i = 0 to {len} {{ access A[i]; }}")).unwrap();
        let t = generate_trace(&p, &none(), b).unwrap();
        assert_eq!(t.distinct_blocks() as i64, (len + b - 1) / b);
    }
}

#[test]
fn block_size_one_keeps_raw_subscripts() {
    let p = corpus::load("transpose").unwrap();
    let t = generate_trace(&p, &bind([("n", 4)]), 1).unwrap();
    for r in t.records() {
        assert_eq!(r.block.indices, r.indices);
    }
}

#[test]
fn matmul_has_four_n_cubed_records() {
    let p = corpus::load("matmul").unwrap();
    let t = generate_trace(&p, &bind([("n", 4)]), 8).unwrap();
    assert_eq!(t.len(), 256);
    assert_eq!(block_sequence(&p, &bind([("n", 4)]), 8).unwrap().len(), 256);
}

#[test]
fn unbound_parameter_is_an_error() {
    let p = corpus::load("matmul").unwrap();
    assert_eq!(
        generate_trace(&p, &none(), 8).unwrap_err(),
        TraceError::UnboundSymbol("n".into())
    );
    assert_eq!(
        generate_trace(&p, &bind([("n", 2)]), 0).unwrap_err(),
        TraceError::InvalidBlockSize(0)
    );
}

#[test]
fn empty_loops_produce_nothing() {
    let p = parse_program("for i = 5 to 5 { access A[i]; } for j = 3 to 1 { access A[j]; }").unwrap();
    assert!(generate_trace(&p, &none(), 1).unwrap().is_empty());
    assert!(timestamp_space(&p, &none()).unwrap().is_empty());
}

#[test]
fn branches_regions() {
    let p = corpus::load("branches").unwrap();
    let sizes: Vec<usize> = timestamp_regions(&p).iter().map(|r| r.points(&[]).len()).collect();
    assert_eq!(sizes, [2026, 1024 * 256, 1002, 1002]);
    let regions = timestamp_regions(&p);
    let else_points = regions[2].points(&[]);
    assert_eq!(else_points.first().unwrap()[0], 1024);
    assert_eq!(else_points.last().unwrap()[0], 2025);
    let t = generate_trace(&p, &none(), 1).unwrap();
    let stamps: BTreeSet<Vec<i64>> = (0..t.len()).map(|i| t.stamp(i).to_vec()).collect();
    assert_eq!(timestamp_space(&p, &none()).unwrap(), stamps);
    assert_eq!(stamps.len(), 2026 + 1024 * 256 + 2 * 1002);
}

#[test]
fn matmul_space_is_bijective_with_trace() {
    let p = corpus::load("matmul").unwrap();
    let b = bind([("n", 2)]);
    let space = timestamp_space(&p, &b).unwrap();
    let t = generate_trace(&p, &b, 8).unwrap();
    assert_eq!(space.len(), 32);
    let ordered: Vec<Vec<i64>> = space.into_iter().collect();
    for (i, s) in ordered.iter().enumerate() {
        assert_eq!(t.stamp(i), s.as_slice());
    }
}

#[test]
fn padding_examples() {
    assert_eq!(pad_innermost(1000, 8), 1016);
    assert_eq!(pad_innermost(16, 8), 16);
    assert_eq!(next_prime(1000), 1009);
    let p = parse_program("params n; array A[n, n, n]; array B[n]; for i = 0 to n { access A[i, i, i]; access B[i]; }")
        .unwrap();
    let l = pad_layout(&p, &bind([("n", 1000)]), 8).unwrap();
    assert_eq!(l.arrays[0].padded, vec![1000, 1009, 1016]);
    assert_eq!(l.arrays[1].padded, vec![1016]);
    assert_eq!(l.arrays[1].base, 1000 * 1009 * 1016);
    assert!(l.arrays.iter().all(|a| a.base % 8 == 0));
    let u = unpadded_layout(&p, &bind([("n", 1000)]), 8).unwrap();
    assert_eq!(u.arrays[0].padded, u.arrays[0].extents);
}

#[test]
fn linearize_examples() {
    let layout = PaddedLayout {
        arrays: vec![
            ArrayLayout {
                name: "A".into(),
                extents: vec![10],
                padded: vec![16],
                base: 0,
            },
            ArrayLayout {
                name: "B".into(),
                extents: vec![7, 16],
                padded: vec![7, 16],
                base: 0,
            },
        ],
        block_size: 8,
    };
    assert_eq!(linearize(&layout, 0, &[5]).unwrap(), 5);
    assert_eq!(linearize(&layout, 1, &[2, 3]).unwrap(), 35);
    assert!(matches!(
        linearize(&layout, 1, &[7, 0]),
        Err(TraceError::OutOfBounds { .. })
    ));

    let p = corpus::load("matmul").unwrap();
    let l = pad_layout(&p, &bind([("n", 10)]), 8).unwrap();
    let mut ranges: Vec<(i64, i64)> = l.arrays.iter().map(|a| (a.base, a.base + a.size())).collect();
    ranges.sort();
    for w in ranges.windows(2) {
        assert!(w[0].1 <= w[1].0);
    }
}

#[test]
fn dump_formats() {
    let t = generate_trace(&corpus::load("abacc").unwrap(), &none(), 1).unwrap();
    let text = dump_text(&t);
    assert_eq!(text.lines().next().unwrap(), "t=(0) a=A blk=(0)");
    assert_eq!(text.lines().count(), 5);
    let mut buf = Vec::new();
    write_csv(&t, &mut buf).unwrap();
    let csv = String::from_utf8(buf).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "pos,t,array,index,block");
    assert_eq!(csv.lines().nth(2).unwrap(), "1,1,B,0,0");
}

#[test]
fn replication_prefixes_copy_index() {
    let t = generate_trace(&corpus::load("abacc").unwrap(), &none(), 1).unwrap();
    let r = t.replicate(3);
    assert_eq!(r.len(), 15);
    assert_eq!(r.distinct_blocks(), 3);
    assert_eq!(r.stamp(5), &[1, 0][..]);
    assert_eq!(&r.block_ids()[10..], &t.block_ids()[..]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn space_matches_trace_and_order_is_strict(s in common::shape(), n in 0i64..4) {
        let src = common::render(&s);
        let p = parse_program(&src).unwrap();
        let b = bind([("n", n)]);
        let t = generate_trace(&p, &b, 2).unwrap();
        for i in 1..t.len() {
            prop_assert!(t.stamp(i - 1) < t.stamp(i), "order broken at {i}\n{src}");
        }
        let stamps: BTreeSet<Vec<i64>> = (0..t.len()).map(|i| t.stamp(i).to_vec()).collect();
        let space = timestamp_space(&p, &b).unwrap();
        prop_assert_eq!(space.len(), t.len());
        prop_assert_eq!(space, stamps);
    }
}

//! Timestamp regions of a branching program, built from constraints and
//! checked against the stamps of its trace.
//!
//! Run with `cargo run --release --example timestamp_space`.

use std::collections::BTreeSet;

use algebraic_locality::corpus;
use algebraic_locality::trace::{generate_trace, timestamp_regions, timestamp_space, Bindings};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prog = corpus::load("branches")?;
    let none = Bindings::new();
    for r in timestamp_regions(&prog) {
        let n = r.points(&[]).len();
        println!("statement {}: {n} points\n  {}", r.statement, r.describe(&prog));
    }
    let space = timestamp_space(&prog, &none)?;
    let trace = generate_trace(&prog, &none, 1)?;
    let stamps: BTreeSet<Vec<i64>> = (0..trace.len()).map(|i| trace.stamp(i).to_vec()).collect();
    println!("\n{} timestamps; matches the trace: {}", space.len(), space == stamps);
    Ok(())
}

//! Reuse intervals of a five-access trace, closed under infinite repeat,
//! with the footprint identities they satisfy.
//!
//! Run with `cargo run --example ri_distribution`.

use algebraic_locality::corpus;
use algebraic_locality::ri::{backward_ris, footprint_oracle, ri_distribution, ri_sum_check, rtfp, xiang_footprint};
use algebraic_locality::trace::{block_sequence, Bindings};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prog = corpus::load("abacc")?;
    let ids = block_sequence(&prog, &Bindings::new(), 1)?;
    let (ris, _) = backward_ris(&ids);
    println!("blocks {ids:?}");
    println!("backward intervals {ris:?}");

    let dist = ri_distribution(&ids);
    println!("\n{:>5} {:>5} {:>9}", "ri", "real", "imaginary");
    for (v, c) in dist.iter() {
        println!("{v:>5} {:>5} {:>9}", c.real, c.imaginary);
    }
    let sum = ri_sum_check(&dist);
    println!("sum ri * P(ri) = {} = m = {}", sum.sum, sum.expected);

    println!("\n{:>2} {:>8} {:>8} {:>6}", "x", "window", "xiang", "rtfp");
    for x in 0..=ids.len() {
        println!(
            "{x:>2} {:>8} {:>8} {:>6}",
            footprint_oracle(&ids, x).to_string(),
            xiang_footprint(&ids, x).to_string(),
            rtfp(&dist, x as u64).to_string()
        );
    }
    Ok(())
}

//! Fully associative and 12-way LRU simulation of a padded matrix multiply
//! across cache sizes.
//!
//! Run with `cargo run --release --example simulate_sweep`.

use algebraic_locality::corpus;
use algebraic_locality::sim::{sweep, CacheGeometry};
use algebraic_locality::trace::{bind, generate_trace, pad_layout, unpadded_layout};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prog = corpus::load("matmul")?;
    let b = 8;
    let bindings = bind([("n", 32)]);
    let trace = generate_trace(&prog, &bindings, b)?;
    let padded = pad_layout(&prog, &bindings, b)?;
    let plain = unpadded_layout(&prog, &bindings, b)?;
    for a in &padded.arrays {
        println!(
            "{}: extents {:?} padded to {:?} at {}",
            a.name, a.extents, a.padded, a.base
        );
    }
    let sizes = [12, 24, 48, 96, 192, 384];
    let full: Vec<_> = sizes
        .iter()
        .map(|&c| CacheGeometry::fully_associative(c, b, 64))
        .collect();
    let ways: Vec<_> = sizes
        .iter()
        .map(|&c| CacheGeometry::set_associative(12, c / 12, b, 64))
        .collect();
    let fa = sweep(&trace, &padded, &full)?;
    let sa = sweep(&trace, &padded, &ways)?;
    let sa_plain = sweep(&trace, &plain, &ways)?;
    println!(
        "\n{:>6} {:>10} {:>14} {:>16}",
        "blocks", "full", "12-way padded", "12-way unpadded"
    );
    for i in 0..sizes.len() {
        println!(
            "{:>6} {:>10} {:>14} {:>16}",
            sizes[i], fa[i].misses, sa[i].misses, sa_plain[i].misses
        );
    }
    Ok(())
}

//! Concrete working-set table of a stencil and step-mode miss-ratio
//! queries against it.
//!
//! Run with `cargo run --release --example denning_table`.

use algebraic_locality::corpus;
use algebraic_locality::denning::{denning_table, query_miss_ratio, QueryMode};
use algebraic_locality::ri::{ri_distribution, rtfp};
use algebraic_locality::trace::{bind, block_sequence};
use num_rational::BigRational;
use num_traits::ToPrimitive;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prog = corpus::load("stencil")?;
    let ids = block_sequence(&prog, &bind([("n", 24)]), 8)?;
    let dist = ri_distribution(&ids);
    let table = denning_table(&dist)?;
    println!(
        "{} accesses, {} blocks, {} table rows",
        dist.n,
        dist.m,
        table.rows.len()
    );
    println!("{:>6} {:>12} {:>10} {:>10}", "ri", "c", "m", "rtfp");
    for (i, r) in table.rows.iter().enumerate() {
        let v = r.value.to_integer().to_u64().unwrap();
        println!(
            "{v:>6} {:>12.3} {:>10.5} {:>10.3}",
            f(&r.cache_size),
            f(&table.adjusted(i)),
            f(&rtfp(&dist, v))
        );
    }
    for c in [4, 8, 16, 32, 64] {
        let q = query_miss_ratio(&table, c, dist.n, QueryMode::Step);
        let i = query_miss_ratio(&table, c, dist.n, QueryMode::Interpolate);
        println!(
            "{c:>3} blocks: step {:.5}, interpolated {:.5}",
            q.miss_ratio_f64(),
            i.miss_ratio_f64()
        );
    }
    Ok(())
}

fn f(x: &BigRational) -> f64 {
    x.to_f64().unwrap()
}

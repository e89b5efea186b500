//! Minimal cache sizes for each attainable miss-ratio bound, and how the
//! linear rows grow when the data size doubles.
//!
//! Run with `cargo run --release --example min_max_scaling`.

use algebraic_locality::corpus;
use algebraic_locality::symbolic::{default_samples, derive_symbolic_table, min_max_scaling, symbolic_denning};
use algebraic_locality::trace::Bindings;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["matmul", "traverse1d"] {
        let prog = corpus::load(name)?;
        let table = derive_symbolic_table(&prog, "n", &Bindings::new(), 8, &default_samples(&prog, 8))?;
        let scaling = min_max_scaling(&symbolic_denning(&table)?);
        println!("{name}:");
        for r in &scaling.rows {
            println!("  {:<16} {}", r.min_cache_size.to_string(), r.max_miss_ratio);
        }
        let n = 4096.0;
        for r in scaling.rows.iter().filter(|r| r.min_cache_size.degree() == Some(1)) {
            let grow = r.min_cache_size.eval_f64(n * 2f64.sqrt()) / r.min_cache_size.eval_f64(n);
            println!("  {} grows by {grow:.4} when n^2 doubles", r.min_cache_size);
        }
    }
    Ok(())
}

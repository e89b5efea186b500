//! Symbolic reuse-interval and cache tables for matrix multiplication.
//!
//! Run with `cargo run --release --example symbolic_matmul`.

use algebraic_locality::corpus;
use algebraic_locality::symbolic::{
    derive_symbolic_table, min_max_scaling, predict, ri_sum_check_symbolic, symbolic_denning,
};
use algebraic_locality::trace::Bindings;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prog = corpus::load("matmul")?;
    let b = 8;
    let samples: Vec<i64> = (1..=6).map(|k| k * b).collect();
    let table = derive_symbolic_table(&prog, "n", &Bindings::new(), b, &samples)?;
    println!(
        "fitted {:?}, held out {:?}, degenerate {:?}",
        table.fitted, table.held_out, table.degenerate
    );
    println!(
        "valid for n = 0 mod {} and n >= {}",
        table.domain.modulus, table.domain.min_n
    );
    println!("{:>3}  {:<28} {:<24} imaginary", "row", "ri", "real");
    for (i, r) in table.rows.iter().enumerate() {
        println!(
            "{:>3}  {:<28} {:<24} {}",
            i + 1,
            r.value.to_string(),
            r.real.to_string(),
            r.imaginary
        );
    }
    let sum = ri_sum_check_symbolic(&table);
    println!(
        "sum of ri * P(ri) = {} (data size {}): {}",
        sum.sum,
        sum.expected,
        if sum.pass { "ok" } else { "mismatch" }
    );

    let cache = symbolic_denning(&table)?;
    println!("\n{:>3}  {:<32} miss ratio", "row", "cache size");
    for (i, r) in cache.table.rows.iter().enumerate() {
        println!("{:>3}  {:<32} {}", i, r.cache_size.to_string(), cache.table.adjusted(i));
    }

    let scaling = min_max_scaling(&cache);
    println!("\n{:<24} max miss ratio", "min cache size");
    for r in &scaling.rows {
        println!("{:<24} {}", r.min_cache_size.to_string(), r.max_miss_ratio);
    }

    let q = predict(&cache, 1024, 4096)?;
    println!("\nn = 1024, 4096 blocks: miss ratio {:.6}", q.miss_ratio_f64());
    Ok(())
}

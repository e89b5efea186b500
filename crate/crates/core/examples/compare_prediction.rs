//! Predicted against simulated misses for several kernels, in the form the
//! `compare` command reports.
//!
//! Run with `cargo run --release --example compare_prediction`.

use algebraic_locality::cli::{cmd_compare, Command, RunConfig};

fn main() {
    for (name, n) in [("matmul", 32), ("stencil", 40), ("trmv", 64), ("mvt", 48)] {
        let mut cfg = RunConfig::new(Command::Compare, format!("{name}.aff")).bind("n", n);
        cfg.sweep = vec![12, 24, 48, 96, 192];
        let report = cmd_compare(&cfg);
        println!("== {name}, n = {n}");
        for w in &report.warnings {
            println!("{w}");
        }
        println!("{}", report.output);
    }
}

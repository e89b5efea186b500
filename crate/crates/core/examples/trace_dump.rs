//! Generates the access trace of a small program and prints it with
//! timestamp vectors and data blocks.
//!
//! Run with `cargo run --example trace_dump`.

use algebraic_locality::corpus;
use algebraic_locality::trace::{bind, dump_text, generate_trace, write_csv};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prog = corpus::load("matmul")?;
    let trace = generate_trace(&prog, &bind([("n", 2)]), 2)?;
    println!(
        "{} accesses over {} blocks of 2 elements",
        trace.len(),
        trace.distinct_blocks()
    );
    print!("{}", dump_text(&trace));

    println!("\nfirst records as CSV:");
    let mut buf = Vec::new();
    write_csv(&trace, &mut buf)?;
    for line in String::from_utf8(buf)?.lines().take(5) {
        println!("{line}");
    }
    Ok(())
}

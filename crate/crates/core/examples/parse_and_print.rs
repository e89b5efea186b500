//! Parses a loop nest, prints it back, and shows a diagnostic for a broken
//! program.
//!
//! Run with `cargo run --example parse_and_print`.

use algebraic_locality::dsl::{parse_program, print_program};

const SOURCE: &str = "
params n;
array A[n, n];
array x[n];
array y[n];
for i = 0 to n {
    for j = 0 to i + 1 {
        access y[i];
        access A[i, j];
        access x[j];
        access y[i];
    }
}
";

fn main() {
    let prog = parse_program(SOURCE).expect("valid program");
    println!("parameters: {:?}", prog.symbols);
    println!(
        "loop depth: {}, timestamp dimensions: {}",
        prog.loop_depth(),
        prog.timestamp_dims()
    );
    println!("--- printed ---\n{}", print_program(&prog));

    let reparsed = parse_program(&print_program(&prog)).expect("printed form parses");
    assert_eq!(reparsed, prog);
    println!("round trip: identical AST");

    for bad in [
        "params n; array A[n]; for i = 0 to n { access A[i * n]; }",
        "params n; array A[n]; for i = 0 to n { access B[i]; }",
        "for i = 0 to n { access A[i] }",
    ] {
        println!("\n{bad}\n  -> {}", parse_program(bad).unwrap_err());
    }
}

//! The 3-SAT reduction programs: one reuse interval reveals
//! unsatisfiability, and the count of another equals the model count.
//!
//! Run with `cargo run --release --example hardness_fixtures`.

use algebraic_locality::corpus::{satisfiable_formula, unsatisfiable_formula};
use algebraic_locality::dsl::parse_program;
use algebraic_locality::ri::{backward_ris, Ri};
use algebraic_locality::trace::{block_sequence, Bindings};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (label, f) in [
        ("satisfiable", satisfiable_formula()),
        ("unsatisfiable", unsatisfiable_formula()),
    ] {
        let target = (1u64 << f.vars) + 1;
        let det = parse_program(&f.detection_program())?;
        let (ris, _) = backward_ris(&block_sequence(&det, &Bindings::new(), 1)?);
        let found = ris.contains(&Ri::Reuse(target));

        let cnt = parse_program(&f.counting_program())?;
        let (ris, _) = backward_ris(&block_sequence(&cnt, &Bindings::new(), 1)?);
        let ones = ris.iter().filter(|&&r| r == Ri::Reuse(1)).count();

        println!("{label}: {} vars, {} clauses", f.vars, f.clauses.len());
        println!(
            "  reuse interval {target} present: {found} (unsatisfiable: {})",
            f.count_models() == 0
        );
        println!("  reuse intervals of 1: {ones} (models: {})", f.count_models());
    }
    println!(
        "\ndetection program for the unsatisfiable formula:\n{}",
        unsatisfiable_formula().detection_program()
    );
    Ok(())
}

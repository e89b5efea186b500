use algebraic_locality::corpus::{self, satisfiable_formula, unsatisfiable_formula, Cnf, CORPUS_ENV, KERNELS};
use algebraic_locality::dsl::{parse_program, validate};
use algebraic_locality::ri::{backward_ris, Ri};
use algebraic_locality::trace::{block_sequence, Bindings};
use proptest::prelude::*;

fn ris(src: &str) -> Vec<Ri> {
    let p = parse_program(src).unwrap();
    backward_ris(&block_sequence(&p, &Bindings::new(), 1).unwrap()).0
}

fn detects_unsat(f: &Cnf) -> bool {
    ris(&f.detection_program()).contains(&Ri::Reuse((1 << f.vars) + 1))
}

fn unit_intervals(f: &Cnf) -> u64 {
    ris(&f.counting_program())
        .iter()
        .filter(|&&r| r == Ri::Reuse(1))
        .count() as u64
}

#[test]
fn every_kernel_parses_and_validates() {
    for k in KERNELS {
        let p = corpus::load(k.name).unwrap();
        assert!(validate(&p).is_empty(), "{}", k.name);
        assert_eq!(k.param.is_some(), !p.symbols.is_empty(), "{}", k.name);
    }
    assert!(corpus::kernel("nope").is_none());
}

#[test]
fn override_directory() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("probe.aff"), "access A[0];").unwrap();
    assert!(corpus::source("probe").is_none());
    std::env::set_var(CORPUS_ENV, dir.path());
    assert_eq!(corpus::source("probe").as_deref(), Some("access A[0];"));
    assert_eq!(
        corpus::source("matmul").as_deref(),
        Some(corpus::kernel("matmul").unwrap().source)
    );
    std::env::remove_var(CORPUS_ENV);
}

#[test]
fn fixed_formulas() {
    let s = satisfiable_formula();
    assert_eq!(s.count_models(), 8);
    assert!(!detects_unsat(&s));
    assert_eq!(unit_intervals(&s), 8);
    let u = unsatisfiable_formula();
    assert_eq!(u.count_models(), 0);
    assert!(detects_unsat(&u));
    assert_eq!(unit_intervals(&u), 0);
}

fn cnf() -> impl Strategy<Value = Cnf> {
    (1usize..5).prop_flat_map(|vars| {
        let lit = (1..=vars as i32, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
        prop::collection::vec([lit.clone(), lit.clone(), lit], 1..7).prop_map(move |clauses| Cnf { vars, clauses })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reductions_agree_with_enumeration(f in cnf()) {
        let models = f.count_models();
        prop_assert_eq!(detects_unsat(&f), models == 0);
        prop_assert_eq!(unit_intervals(&f), models);
    }
}

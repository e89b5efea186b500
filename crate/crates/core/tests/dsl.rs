mod common;

use algebraic_locality::corpus;
use algebraic_locality::dsl::{
    parse_program, print_program, validate, AffineExpr, AffineProgram, ArrayDecl, Constraint, ConstraintSet,
    Diagnostic, DslError, Relation, Stmt,
};
use proptest::prelude::*;

fn innermost(s: &Stmt) -> &Stmt {
    match s {
        Stmt::Loop(l) => innermost(&l.body),
        other => other,
    }
}

#[test]
fn minimal_program_is_one_loop_over_one_access() {
    let p = parse_program("for i = 0 to n step 1 { access A[i]; }").unwrap();
    assert_eq!(p.symbols, vec!["n".to_string()]);
    let Stmt::Loop(l) = &p.body else {
        panic!("expected a loop")
    };
    assert_eq!(l.step, 1);
    assert_eq!(l.lower, AffineExpr::Const(0));
    assert_eq!(l.upper, AffineExpr::Symbol(0));
    let Stmt::Access(a) = &*l.body else {
        panic!("expected an access")
    };
    assert_eq!(a.subscripts, vec![AffineExpr::IndexVar(0)]);
    assert_eq!(p.arrays[0].dims, None);
}

#[test]
fn matmul_is_three_loops_around_four_accesses() {
    for name in ["matmul", "matmul_cabc"] {
        let p = corpus::load(name).unwrap();
        assert_eq!(p.loop_depth(), 3);
        let Stmt::Block(body) = innermost(&p.body) else {
            panic!("expected a block")
        };
        assert_eq!(body.len(), 4);
        assert!(body.iter().all(|s| matches!(s, Stmt::Access(_))));
        assert!(validate(&p).is_empty());
    }
    let order = |name: &str| -> Vec<String> {
        let p = corpus::load(name).unwrap();
        let mut v = Vec::new();
        p.body.for_each_access(&mut |a| v.push(p.arrays[a.array].name.clone()));
        v
    };
    assert_eq!(order("matmul_cabc"), ["C", "A", "B", "C"]);
    assert_eq!(order("matmul"), ["A", "B", "C", "C"]);
}

#[test]
fn symbol_times_index_is_rejected() {
    for src in [
        "params n; array A[n]; for i = 0 to n { access A[n*i]; }",
        "params n; array A[n]; for i = 0 to n { access A[i*n]; }",
    ] {
        match parse_program(src) {
            Err(DslError::NonAffine { reason, .. }) => assert!(reason.contains("coefficient"), "{reason}"),
            other => panic!("expected NonAffine, got {other:?}"),
        }
    }
    assert!(matches!(
        parse_program("params n, m; array A[n]; for i = 0 to n { access A[n*m]; }"),
        Err(DslError::NonAffine { .. })
    ));
    assert!(matches!(
        parse_program("for i = 0 to n { for j = 0 to n { access A[i*j]; } }"),
        Err(DslError::NonAffine { .. })
    ));
    assert!(matches!(
        parse_program("for i = 0 to n { access A[floor(i / n)]; }"),
        Err(DslError::NonAffine { .. })
    ));
    assert!(matches!(
        parse_program("for i = 0 to n { access A[floor(i / 0)]; }"),
        Err(DslError::NonAffine { .. })
    ));
}

#[test]
fn constant_products_fold() {
    let p = parse_program("for i = 0 to n { access A[2 * 3 * i + 4 * (1 + 1)]; }").unwrap();
    let mut got = None;
    p.body.for_each_access(&mut |a| got = Some(a.subscripts[0].clone()));
    assert_eq!(got.unwrap().eval(&[5], &[0]), 38);
}

#[test]
fn syntax_errors_carry_position_and_expectation() {
    match parse_program("for i = 0 to n {\n  access A[i]\n}") {
        Err(DslError::Syntax {
            line, expected, found, ..
        }) => {
            assert_eq!(line, 3);
            assert!(expected.contains(';'));
            assert!(found.contains('}'));
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        parse_program("for i = 0 to n { access A[i / 2]; }"),
        Err(DslError::Syntax { .. })
    ));
    assert!(matches!(
        parse_program("for i = 0 to n { }"),
        Err(DslError::Syntax { .. })
    ));
    assert!(matches!(
        parse_program("params n; array A[n]; for n = 0 to 4 { access A[n]; }"),
        Err(DslError::Syntax { .. })
    ));
}

#[test]
fn declared_headers_make_names_strict() {
    match parse_program("params n; array A[n]; for i = 0 to m { access A[i]; }") {
        Err(DslError::Scope { name, .. }) => assert_eq!(name, "m"),
        other => panic!("{other:?}"),
    }
    match parse_program("params n; array A[n]; for i = 0 to n { access B[i]; }") {
        Err(DslError::Scope { name, .. }) => assert_eq!(name, "B"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn branches_constructs_parse() {
    let p = corpus::load("branches").unwrap();
    let Stmt::Loop(l) = &p.body else { panic!() };
    let Stmt::Block(items) = &*l.body else { panic!() };
    assert_eq!(items.len(), 2);
    let Stmt::If { then, otherwise, cond } = &items[1] else {
        panic!()
    };
    assert_eq!(cond.disjuncts.len(), 1);
    let Stmt::Loop(inner) = &**then else { panic!() };
    assert_eq!(inner.step, 4);
    assert!(matches!(otherwise.as_deref(), Some(Stmt::Block(b)) if b.len() == 2));
}

#[test]
fn comparisons_normalize_to_eq_and_lt() {
    let p = parse_program("for i = 0 to 10 { if (i <= 3 || i > 7 && i != 9) { access A[i]; } }").unwrap();
    let Stmt::Loop(l) = &p.body else { panic!() };
    let Stmt::If { cond, .. } = &*l.body else { panic!() };
    let taken: Vec<i64> = (0..10).filter(|&i| cond.holds(&[i], &[])).collect();
    assert_eq!(taken, vec![0, 1, 2, 3, 8]);
    assert!(cond.constraints().all(|c| matches!(c.rel, Relation::Eq | Relation::Lt)));
    let q = parse_program("for i = 0 to 10 { if ((i == 2 || i == 4) && i >= 3) { access A[i]; } }").unwrap();
    let Stmt::Loop(l) = &q.body else { panic!() };
    let Stmt::If { cond, .. } = &*l.body else { panic!() };
    let taken: Vec<i64> = (0..10).filter(|&i| cond.holds(&[i], &[])).collect();
    assert_eq!(taken, vec![4]);
}

#[test]
fn conditions_may_use_only_parameters() {
    let p = parse_program("params n; array A[4]; if (n > 2) { access A[0]; }").unwrap();
    assert!(validate(&p).is_empty());
}

#[test]
fn validate_reports_each_violation() {
    let mut p = parse_program("params n; array A[n, n]; for i = 0 to n { access A[i, 0]; }").unwrap();
    assert!(validate(&p).is_empty());
    if let Stmt::Loop(l) = &mut p.body {
        *l.body = Stmt::Access(algebraic_locality::dsl::Access {
            array: 0,
            subscripts: vec![AffineExpr::IndexVar(0)],
        });
    }
    assert!(matches!(
        &validate(&p)[..],
        [Diagnostic::RankMismatch {
            expected: 2,
            found: 1,
            ..
        }]
    ));

    let empty_if = AffineProgram {
        symbols: vec![],
        arrays: vec![ArrayDecl {
            name: "A".into(),
            rank: 1,
            dims: Some(vec![AffineExpr::Const(4)]),
        }],
        body: Stmt::If {
            cond: ConstraintSet {
                disjuncts: vec![vec![]],
            },
            then: Box::new(Stmt::Access(algebraic_locality::dsl::Access {
                array: 0,
                subscripts: vec![AffineExpr::Const(0)],
            })),
            otherwise: None,
        },
    };
    assert_eq!(validate(&empty_if), vec![Diagnostic::EmptyConstraint]);

    let mut bad = empty_if.clone();
    bad.body = Stmt::If {
        cond: ConstraintSet {
            disjuncts: vec![vec![Constraint {
                expr: AffineExpr::IndexVar(0),
                rel: Relation::Lt,
            }]],
        },
        then: Box::new(Stmt::Block(vec![Stmt::Access(algebraic_locality::dsl::Access {
            array: 0,
            subscripts: vec![AffineExpr::floor_div(AffineExpr::Const(1), 0)],
        })])),
        otherwise: None,
    };
    let d = validate(&bad);
    assert!(d.iter().any(|x| matches!(x, Diagnostic::UnboundIndexVar { .. })));
    assert!(d.iter().any(|x| matches!(x, Diagnostic::NonPositiveDivisor(0))));
    assert!(d.iter().any(|x| matches!(x, Diagnostic::ShortBlock(1))));
}

#[test]
fn negative_step_is_invalid() {
    match parse_program("for i = 0 to 4 step -1 { access A[i]; }") {
        Err(DslError::Invalid(d)) => assert_eq!(d, vec![Diagnostic::NonPositiveStep(-1)]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn corpus_round_trips() {
    for k in corpus::KERNELS {
        let p = corpus::load(k.name).unwrap();
        let again = parse_program(&print_program(&p)).unwrap();
        assert_eq!(again, p, "{}", k.name);
        assert_eq!(print_program(&again), print_program(&p));
    }
}

#[test]
fn simplify_collects_like_terms() {
    let e = AffineExpr::minus(
        AffineExpr::plus(AffineExpr::Const(3), AffineExpr::scale(2, AffineExpr::IndexVar(0))),
        AffineExpr::plus(AffineExpr::IndexVar(0), AffineExpr::Const(3)),
    );
    assert_eq!(e.simplify(), AffineExpr::IndexVar(0));
    assert_eq!(
        AffineExpr::floor_div(AffineExpr::Const(7), 2).simplify(),
        AffineExpr::Const(3)
    );
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(s in common::shape()) {
        let src = common::render(&s);
        let p = parse_program(&src).map_err(|e| TestCaseError::fail(format!("{e}\n{src}")))?;
        let printed = print_program(&p);
        let q = parse_program(&printed).map_err(|e| TestCaseError::fail(format!("{e}\n{printed}")))?;
        prop_assert_eq!(&q, &p);
        prop_assert_eq!(print_program(&q), printed);
    }

    #[test]
    fn simplify_preserves_value(s in common::shape(), iv in prop::collection::vec(-20i64..20, 6), n in 0i64..9) {
        let p = parse_program(&common::render(&s)).unwrap();
        let mut ok = true;
        p.body.for_each_access(&mut |a| {
            for e in &a.subscripts {
                let depth = e.index_vars().iter().max().map_or(0, |l| l + 1);
                if depth <= iv.len() && e.eval(&iv, &[n]) != e.simplify().eval(&iv, &[n]) {
                    ok = false;
                }
            }
        });
        prop_assert!(ok);
    }
}

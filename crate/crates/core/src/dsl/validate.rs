use std::fmt;

use super::ast::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    UnboundIndexVar {
        level: usize,
        depth: usize,
    },
    UnknownSymbol(usize),
    UnknownArray(ArrayId),
    RankMismatch {
        array: String,
        expected: usize,
        found: usize,
    },
    EmptyConstraint,
    NonPositiveStep(i64),
    NonPositiveDivisor(i64),
    ShortBlock(usize),
    DuplicateArray(String),
    IndexVarInExtent(String),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::UnboundIndexVar { level, depth } => write!(
                f,
                "index variable at level {level} used inside only {depth} enclosing loops"
            ),
            Diagnostic::UnknownSymbol(s) => write!(f, "reference to undeclared parameter #{s}"),
            Diagnostic::UnknownArray(a) => write!(f, "access to undeclared array #{a}"),
            Diagnostic::RankMismatch { array, expected, found } => write!(
                f,
                "array `{array}` has rank {expected} but is accessed with {found} subscripts"
            ),
            Diagnostic::EmptyConstraint => write!(f, "condition has an empty conjunction"),
            Diagnostic::NonPositiveStep(s) => write!(f, "loop step {s} is not positive"),
            Diagnostic::NonPositiveDivisor(d) => write!(f, "division by non-positive constant {d}"),
            Diagnostic::ShortBlock(n) => write!(f, "block holds {n} statements, needs at least 2"),
            Diagnostic::DuplicateArray(a) => write!(f, "array `{a}` declared twice"),
            Diagnostic::IndexVarInExtent(a) => {
                write!(f, "extent of array `{a}` refers to an index variable")
            }
        }
    }
}

/// Checks every structural invariant of a program; empty means well formed.
pub fn validate(prog: &AffineProgram) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for (i, a) in prog.arrays.iter().enumerate() {
        if prog.arrays[..i].iter().any(|b| b.name == a.name) {
            diags.push(Diagnostic::DuplicateArray(a.name.clone()));
        }
        if let Some(dims) = &a.dims {
            if dims.len() != a.rank {
                diags.push(Diagnostic::RankMismatch {
                    array: a.name.clone(),
                    expected: a.rank,
                    found: dims.len(),
                });
            }
            for d in dims {
                if !d.index_vars().is_empty() {
                    diags.push(Diagnostic::IndexVarInExtent(a.name.clone()));
                }
                check_expr(prog, d, usize::MAX, &mut diags);
            }
        }
    }
    check_stmt(prog, &prog.body, 0, &mut diags);
    diags
}

fn check_expr(prog: &AffineProgram, e: &AffineExpr, depth: usize, diags: &mut Vec<Diagnostic>) {
    e.visit(&mut |node| match node {
        AffineExpr::IndexVar(l) if *l >= depth && depth != usize::MAX => {
            diags.push(Diagnostic::UnboundIndexVar { level: *l, depth })
        }
        AffineExpr::Symbol(s) if *s >= prog.symbols.len() => diags.push(Diagnostic::UnknownSymbol(*s)),
        AffineExpr::FloorDiv(_, d) | AffineExpr::CeilDiv(_, d) if *d <= 0 => {
            diags.push(Diagnostic::NonPositiveDivisor(*d))
        }
        _ => {}
    });
}

fn check_stmt(prog: &AffineProgram, s: &Stmt, depth: usize, diags: &mut Vec<Diagnostic>) {
    match s {
        Stmt::Loop(l) => {
            check_expr(prog, &l.lower, depth, diags);
            check_expr(prog, &l.upper, depth, diags);
            if l.step <= 0 {
                diags.push(Diagnostic::NonPositiveStep(l.step));
            }
            check_stmt(prog, &l.body, depth + 1, diags);
        }
        Stmt::Block(stmts) => {
            if stmts.len() < 2 {
                diags.push(Diagnostic::ShortBlock(stmts.len()));
            }
            for c in stmts {
                check_stmt(prog, c, depth, diags);
            }
        }
        Stmt::If { cond, then, otherwise } => {
            if cond.disjuncts.is_empty() || cond.disjuncts.iter().any(|c| c.is_empty()) {
                diags.push(Diagnostic::EmptyConstraint);
            }
            for c in cond.constraints() {
                check_expr(prog, &c.expr, depth, diags);
            }
            check_stmt(prog, then, depth, diags);
            if let Some(e) = otherwise {
                check_stmt(prog, e, depth, diags);
            }
        }
        Stmt::Access(a) => {
            match prog.arrays.get(a.array) {
                None => diags.push(Diagnostic::UnknownArray(a.array)),
                Some(decl) if decl.rank != a.subscripts.len() => diags.push(Diagnostic::RankMismatch {
                    array: decl.name.clone(),
                    expected: decl.rank,
                    found: a.subscripts.len(),
                }),
                Some(_) => {}
            }
            for e in &a.subscripts {
                check_expr(prog, e, depth, diags);
            }
        }
    }
}

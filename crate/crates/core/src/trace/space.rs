//! Timestamp space built from per-statement constraint sets rather than by
//! running the program.
//!
//! Every access statement contributes one region: each vector dimension is
//! either pinned to a block position, ranges over `[0, trip)` for a loop, or
//! is dead and fixed to zero, and `if` conditions (negated on the `else`
//! side) become filters. Loop index variables are rewritten in terms of the
//! vector dimensions as `lower + step * d`.

use std::collections::BTreeSet;

use crate::dsl::{AffineExpr, AffineProgram, Constraint, ConstraintSet, Relation, Stmt};

use super::interp::{symbol_values, Bindings};
use super::TraceError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DimRule {
    /// `0 <= d < upper`, where `upper` reads earlier dimensions.
    Range(AffineExpr),
    Fixed(i64),
}

/// Constraint description of the timestamps of one access statement.
#[derive(Debug, Clone)]
pub struct Region {
    /// Position of the access statement in program order.
    pub statement: usize,
    pub rules: Vec<DimRule>,
    /// Every set must hold; expressions read vector dimensions.
    pub filters: Vec<ConstraintSet>,
}

impl Region {
    /// Materializes all points of the region at concrete parameter values.
    pub fn points(&self, syms: &[i64]) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(self.rules.len());
        self.scan(syms, &mut cur, &mut out);
        out
    }

    fn scan(&self, syms: &[i64], cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let k = cur.len();
        if k == self.rules.len() {
            if self.filters.iter().all(|f| f.holds(cur, syms)) {
                out.push(cur.clone());
            }
            return;
        }
        match &self.rules[k] {
            DimRule::Fixed(v) => {
                cur.push(*v);
                self.scan(syms, cur, out);
                cur.pop();
            }
            DimRule::Range(upper) => {
                let hi = upper.eval(cur, syms);
                for v in 0..hi {
                    cur.push(v);
                    self.scan(syms, cur, out);
                    cur.pop();
                }
            }
        }
    }

    /// Human-readable form such as `d0 in [0, n), d1 = 1 | (d0 - 1024) < 0`.
    pub fn describe(&self, prog: &AffineProgram) -> String {
        let mut parts: Vec<String> = self
            .rules
            .iter()
            .enumerate()
            .map(|(k, r)| match r {
                DimRule::Fixed(v) => format!("d{k} = {v}"),
                DimRule::Range(u) => format!("d{k} in [0, {})", dim_expr(prog, u)),
            })
            .collect();
        if parts.is_empty() {
            parts.push("{()}".to_string());
        }
        let mut s = parts.join(", ");
        for f in &self.filters {
            let conj: Vec<String> = f
                .disjuncts
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|a| {
                            let op = if a.rel == Relation::Eq { "==" } else { "<" };
                            format!("{} {} 0", dim_expr(prog, &a.expr), op)
                        })
                        .collect::<Vec<_>>()
                        .join(" && ")
                })
                .collect();
            s.push_str(" | ");
            s.push_str(&conj.join(" || "));
        }
        s
    }
}

fn dim_expr(prog: &AffineProgram, e: &AffineExpr) -> String {
    render(prog, &e.simplify())
}

fn render(prog: &AffineProgram, e: &AffineExpr) -> String {
    match e {
        AffineExpr::Const(c) => c.to_string(),
        AffineExpr::IndexVar(l) => format!("d{l}"),
        AffineExpr::Symbol(s) => prog.symbols[*s].clone(),
        AffineExpr::Add(a, b) => format!("{} + {}", render(prog, a), render(prog, b)),
        AffineExpr::Sub(a, b) => format!("{} - {}", render(prog, a), render(prog, b)),
        AffineExpr::Scale(-1, a) => format!("-{}", render(prog, a)),
        AffineExpr::Scale(k, a) => format!("{}{}", k, render(prog, a)),
        AffineExpr::FloorDiv(a, d) => format!("floor({} / {})", render(prog, a), d),
        AffineExpr::CeilDiv(a, d) => format!("ceil({} / {})", render(prog, a), d),
    }
}

fn subst(e: &AffineExpr, map: &[AffineExpr]) -> AffineExpr {
    match e {
        AffineExpr::IndexVar(l) => map[*l].clone(),
        AffineExpr::Const(_) | AffineExpr::Symbol(_) => e.clone(),
        AffineExpr::Add(a, b) => AffineExpr::plus(subst(a, map), subst(b, map)),
        AffineExpr::Sub(a, b) => AffineExpr::minus(subst(a, map), subst(b, map)),
        AffineExpr::Scale(k, a) => AffineExpr::scale(*k, subst(a, map)),
        AffineExpr::FloorDiv(a, d) => AffineExpr::floor_div(subst(a, map), *d),
        AffineExpr::CeilDiv(a, d) => AffineExpr::ceil_div(subst(a, map), *d),
    }
}

fn subst_set(s: &ConstraintSet, map: &[AffineExpr]) -> ConstraintSet {
    ConstraintSet {
        disjuncts: s
            .disjuncts
            .iter()
            .map(|c| {
                c.iter()
                    .map(|a| Constraint {
                        expr: subst(&a.expr, map),
                        rel: a.rel,
                    })
                    .collect()
            })
            .collect(),
    }
}

/// Complement of a constraint set, again in disjunctive normal form.
pub fn negate(s: &ConstraintSet) -> ConstraintSet {
    let lt = |e: AffineExpr| Constraint {
        expr: e,
        rel: Relation::Lt,
    };
    let mut acc: Vec<Vec<Constraint>> = vec![vec![]];
    for conj in &s.disjuncts {
        let mut options = Vec::new();
        for a in conj {
            match a.rel {
                Relation::Eq => {
                    options.push(lt(a.expr.clone()));
                    options.push(lt(AffineExpr::scale(-1, a.expr.clone())));
                }
                Relation::Lt => options.push(lt(AffineExpr::minus(
                    AffineExpr::scale(-1, a.expr.clone()),
                    AffineExpr::Const(1),
                ))),
            }
        }
        let mut next = Vec::with_capacity(acc.len() * options.len());
        for base in &acc {
            for o in &options {
                let mut c = base.clone();
                c.push(o.clone());
                next.push(c);
            }
        }
        acc = next;
    }
    ConstraintSet { disjuncts: acc }
}

struct Builder {
    dims: usize,
    next_stmt: usize,
    out: Vec<Region>,
}

impl Builder {
    fn walk(
        &mut self,
        s: &Stmt,
        ivars: &mut Vec<AffineExpr>,
        rules: &mut Vec<DimRule>,
        filters: &mut Vec<ConstraintSet>,
    ) {
        match s {
            Stmt::Access(_) => {
                let mut r = rules.clone();
                r.resize(self.dims, DimRule::Fixed(0));
                self.out.push(Region {
                    statement: self.next_stmt,
                    rules: r,
                    filters: filters.clone(),
                });
                self.next_stmt += 1;
            }
            Stmt::Loop(l) => {
                let level = rules.len();
                let lo = subst(&l.lower, ivars);
                let hi = subst(&l.upper, ivars);
                let span = AffineExpr::minus(hi, lo.clone());
                let trip = if l.step == 1 {
                    span
                } else {
                    AffineExpr::ceil_div(span, l.step)
                };
                rules.push(DimRule::Range(trip));
                ivars.push(AffineExpr::plus(
                    lo,
                    AffineExpr::scale(l.step, AffineExpr::IndexVar(level)),
                ));
                self.walk(&l.body, ivars, rules, filters);
                ivars.pop();
                rules.pop();
            }
            Stmt::Block(stmts) => {
                for (k, c) in stmts.iter().enumerate() {
                    rules.push(DimRule::Fixed(k as i64));
                    self.walk(c, ivars, rules, filters);
                    rules.pop();
                }
            }
            Stmt::If { cond, then, otherwise } => {
                let c = subst_set(cond, ivars);
                let not_c = negate(&c);
                filters.push(c);
                self.walk(then, ivars, rules, filters);
                filters.pop();
                filters.push(not_c);
                if let Some(e) = otherwise {
                    self.walk(e, ivars, rules, filters);
                }
                filters.pop();
            }
        }
    }
}

/// One region per access statement, in program order.
pub fn timestamp_regions(prog: &AffineProgram) -> Vec<Region> {
    let mut b = Builder {
        dims: prog.timestamp_dims(),
        next_stmt: 0,
        out: Vec::new(),
    };
    b.walk(&prog.body, &mut Vec::new(), &mut Vec::new(), &mut Vec::new());
    b.out
}

/// The set of timestamp vectors of the program at concrete parameter values.
pub fn timestamp_space(prog: &AffineProgram, bindings: &Bindings) -> Result<BTreeSet<Vec<i64>>, TraceError> {
    let syms = symbol_values(prog, bindings)?;
    let mut out = BTreeSet::new();
    for r in timestamp_regions(prog) {
        out.extend(r.points(&syms));
    }
    Ok(out)
}

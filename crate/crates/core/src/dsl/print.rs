use std::fmt::{self, Write};

use super::ast::*;

/// Renders a program back to `.aff` source. Parsing the output yields the
/// same AST.
pub fn print_program(prog: &AffineProgram) -> String {
    let mut out = String::new();
    let declared = prog.arrays.iter().any(|a| a.dims.is_some());
    if declared {
        if !prog.symbols.is_empty() {
            let _ = writeln!(out, "params {};", prog.symbols.join(", "));
        }
        let names = Names {
            prog,
            scope: Vec::new(),
        };
        for a in &prog.arrays {
            let dims: Vec<String> = a.dims.iter().flatten().map(|d| names.expr(d)).collect();
            let _ = writeln!(out, "array {}[{}];", a.name, dims.join(", "));
        }
    }
    let mut names = Names {
        prog,
        scope: Vec::new(),
    };
    match &prog.body {
        Stmt::Block(stmts) => {
            for s in stmts {
                names.stmt(&mut out, s, 0);
            }
        }
        s => names.stmt(&mut out, s, 0),
    }
    out
}

impl fmt::Display for AffineProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_program(self))
    }
}

struct Names<'a> {
    prog: &'a AffineProgram,
    scope: Vec<&'a str>,
}

impl<'a> Names<'a> {
    fn expr(&self, e: &AffineExpr) -> String {
        match e {
            AffineExpr::Const(c) => c.to_string(),
            AffineExpr::IndexVar(l) => self.scope.get(*l).map_or_else(|| format!("i{l}"), |s| s.to_string()),
            AffineExpr::Symbol(s) => self.prog.symbols.get(*s).cloned().unwrap_or_else(|| format!("s{s}")),
            AffineExpr::Add(a, b) => format!("({} + {})", self.expr(a), self.expr(b)),
            AffineExpr::Sub(a, b) => format!("({} - {})", self.expr(a), self.expr(b)),
            AffineExpr::Scale(k, e) => format!("({} * {})", k, self.expr(e)),
            AffineExpr::FloorDiv(e, d) => format!("floor({} / {})", self.expr(e), d),
            AffineExpr::CeilDiv(e, d) => format!("ceil({} / {})", self.expr(e), d),
        }
    }

    fn constraint(&self, c: &Constraint) -> String {
        let op = match c.rel {
            Relation::Eq => "==",
            Relation::Lt => "<",
        };
        format!("{} {} 0", self.expr(&c.expr), op)
    }

    fn set(&self, s: &ConstraintSet) -> String {
        s.disjuncts
            .iter()
            .map(|conj| conj.iter().map(|c| self.constraint(c)).collect::<Vec<_>>().join(" && "))
            .collect::<Vec<_>>()
            .join(" || ")
    }

    fn body(&mut self, out: &mut String, s: &'a Stmt, depth: usize) {
        out.push_str("{\n");
        match s {
            Stmt::Block(stmts) => {
                for c in stmts {
                    self.stmt(out, c, depth + 1);
                }
            }
            other => self.stmt(out, other, depth + 1),
        }
        indent(out, depth);
        out.push('}');
    }

    fn stmt(&mut self, out: &mut String, s: &'a Stmt, depth: usize) {
        indent(out, depth);
        match s {
            Stmt::Access(a) => {
                let subs: Vec<String> = a.subscripts.iter().map(|e| self.expr(e)).collect();
                let name = self
                    .prog
                    .arrays
                    .get(a.array)
                    .map_or_else(|| format!("a{}", a.array), |d| d.name.clone());
                let _ = writeln!(out, "access {}[{}];", name, subs.join(", "));
            }
            Stmt::Loop(l) => {
                let _ = write!(
                    out,
                    "for {} = {} to {} step {} ",
                    l.var,
                    self.expr(&l.lower),
                    self.expr(&l.upper),
                    l.step
                );
                self.scope.push(&l.var);
                self.body(out, &l.body, depth);
                self.scope.pop();
                out.push('\n');
            }
            Stmt::If { cond, then, otherwise } => {
                let _ = write!(out, "if ({}) ", self.set(cond));
                self.body(out, then, depth);
                if let Some(e) = otherwise {
                    out.push_str(" else ");
                    self.body(out, e, depth);
                }
                out.push('\n');
            }
            Stmt::Block(_) => {
                self.body(out, s, depth);
                out.push('\n');
            }
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

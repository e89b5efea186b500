//! Bundled example programs and generators for the 3-SAT reduction
//! programs.
//!
//! Programs are embedded at build time. Setting `LOCALITY_CORPUS` to a
//! directory makes [`source`] read `<dir>/<name>.aff` from disk instead.

use std::fmt::Write as _;

use crate::dsl::{parse_program, AffineProgram, DslError};

/// Environment variable naming an alternative corpus directory.
pub const CORPUS_ENV: &str = "LOCALITY_CORPUS";

/// A bundled kernel and the settings it is analyzed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Kernel {
    pub name: &'static str,
    pub source: &'static str,
    /// Loop-bound parameter, if any.
    pub param: Option<&'static str>,
    /// Parameter value whose data is a few times a 96-block cache.
    pub accuracy_n: i64,
    /// Small parameter value for quick checks.
    pub small_n: i64,
}

macro_rules! kernel {
    ($name:literal, $param:expr, $acc:expr, $small:expr) => {
        Kernel {
            name: $name,
            source: include_str!(concat!("../corpus/", $name, ".aff")),
            param: $param,
            accuracy_n: $acc,
            small_n: $small,
        }
    };
}

pub const KERNELS: &[Kernel] = &[
    kernel!("matmul", Some("n"), 32, 8),
    kernel!("matmul_cabc", Some("n"), 32, 8),
    kernel!("traverse1d", Some("n"), 2048, 16),
    kernel!("traverse2d", Some("n"), 48, 8),
    kernel!("stencil", Some("n"), 40, 8),
    kernel!("transpose", Some("n"), 32, 8),
    kernel!("gemv", Some("n"), 48, 8),
    kernel!("mvt", Some("n"), 48, 8),
    kernel!("trmv", Some("n"), 64, 8),
    kernel!("jacobi2d", Some("n"), 40, 8),
    kernel!("conv1d", Some("n"), 2048, 16),
    kernel!("branches", None, 0, 0),
    kernel!("abacc", None, 0, 0),
];

pub fn kernel(name: &str) -> Option<&'static Kernel> {
    KERNELS.iter().find(|k| k.name == name)
}

/// Source text of a corpus program, honoring [`CORPUS_ENV`].
pub fn source(name: &str) -> Option<String> {
    if let Ok(dir) = std::env::var(CORPUS_ENV) {
        let path = std::path::Path::new(&dir).join(format!("{name}.aff"));
        if let Ok(s) = std::fs::read_to_string(path) {
            return Some(s);
        }
    }
    kernel(name).map(|k| k.source.to_string())
}

/// Parses a corpus program. Panics on unknown names; errors only if an
/// override directory holds a broken file.
pub fn load(name: &str) -> Result<AffineProgram, DslError> {
    let src = source(name).unwrap_or_else(|| panic!("no corpus program named `{name}`"));
    parse_program(&src)
}

/// A formula in conjunctive normal form with three literals per clause.
/// Literal `k > 0` is variable `k - 1`, and `-k` its negation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<[i32; 3]>,
}

impl Cnf {
    pub fn eval(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&l| {
                let bit = (assignment >> (l.unsigned_abs() - 1)) & 1 == 1;
                if l > 0 {
                    bit
                } else {
                    !bit
                }
            })
        })
    }

    /// Satisfying assignments by enumeration.
    pub fn count_models(&self) -> u64 {
        (0..1u64 << self.vars).filter(|&a| self.eval(a)).count() as u64
    }

    /// `ceil((v1 + v2 + v3) / 3)` per clause, summed: equals the clause
    /// count exactly when the assignment satisfies the formula.
    fn satisfied_sum(&self) -> String {
        let lit = |l: i32| {
            let v = format!("x{}", l.unsigned_abs() - 1);
            if l > 0 {
                v
            } else {
                format!("(1 - {v})")
            }
        };
        self.clauses
            .iter()
            .map(|c| format!("ceil(({} + {} + {}) / 3)", lit(c[0]), lit(c[1]), lit(c[2])))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    fn loops(&self, out: &mut String, body: &[String]) {
        for v in 0..self.vars {
            let _ = writeln!(out, "{}for x{v} = 0 to 2 step 1 {{", "    ".repeat(v));
        }
        for line in body {
            let _ = writeln!(out, "{}{line}", "    ".repeat(self.vars));
        }
        for v in (0..self.vars).rev() {
            let _ = writeln!(out, "{}}}", "    ".repeat(v));
        }
    }

    /// Detection program: `A[m]` is touched before and after a nest that
    /// enumerates all assignments and touches `A[satisfied clauses]`. The
    /// outer pair of accesses has reuse interval `2^vars + 1` exactly when
    /// no assignment satisfies the formula.
    pub fn detection_program(&self) -> String {
        let m = self.clauses.len();
        let mut out = format!("array A[{}];\naccess A[{m}];\n", m + 2);
        self.loops(&mut out, &[format!("access A[{}];", self.satisfied_sum())]);
        let _ = writeln!(out, "access A[{m}];");
        out
    }

    /// Counting program: each assignment touches `A[m]`, `A[satisfied
    /// clauses]` and `A[m + 1]`, so every model contributes one reuse
    /// interval of length 1.
    pub fn counting_program(&self) -> String {
        let m = self.clauses.len();
        let mut out = format!("array A[{}];\n", m + 2);
        self.loops(
            &mut out,
            &[
                format!("access A[{m}];"),
                format!("access A[{}];", self.satisfied_sum()),
                format!("access A[{}];", m + 1),
            ],
        );
        out
    }
}

/// Four variables, satisfiable.
pub fn satisfiable_formula() -> Cnf {
    Cnf {
        vars: 4,
        clauses: vec![[1, 2, -3], [-1, 3, 4], [2, -4, 3], [-2, -3, -4]],
    }
}

/// Three variables with all eight sign patterns as clauses, so every
/// assignment falsifies exactly one clause.
pub fn unsatisfiable_formula() -> Cnf {
    let mut clauses = Vec::new();
    for s in 0..8 {
        let sign = |k: i32| if (s >> (k - 1)) & 1 == 1 { -k } else { k };
        clauses.push([sign(1), sign(2), sign(3)]);
    }
    Cnf { vars: 3, clauses }
}

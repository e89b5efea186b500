//! Typed AST for parameterized affine loop nests.

use std::collections::BTreeSet;

/// Index of an array declaration inside [`AffineProgram::arrays`].
pub type ArrayId = usize;

/// An affine expression over loop index variables and program parameters.
///
/// Index variables are addressed by loop level (`i_0` is the outermost
/// enclosing loop), parameters by their position in [`AffineProgram::symbols`].
/// Coefficients are always integer constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AffineExpr {
    Const(i64),
    IndexVar(usize),
    Symbol(usize),
    Add(Box<AffineExpr>, Box<AffineExpr>),
    Sub(Box<AffineExpr>, Box<AffineExpr>),
    Scale(i64, Box<AffineExpr>),
    FloorDiv(Box<AffineExpr>, i64),
    CeilDiv(Box<AffineExpr>, i64),
}

impl AffineExpr {
    pub fn plus(a: AffineExpr, b: AffineExpr) -> Self {
        AffineExpr::Add(Box::new(a), Box::new(b))
    }

    pub fn minus(a: AffineExpr, b: AffineExpr) -> Self {
        AffineExpr::Sub(Box::new(a), Box::new(b))
    }

    pub fn scale(k: i64, e: AffineExpr) -> Self {
        AffineExpr::Scale(k, Box::new(e))
    }

    pub fn floor_div(e: AffineExpr, d: i64) -> Self {
        AffineExpr::FloorDiv(Box::new(e), d)
    }

    pub fn ceil_div(e: AffineExpr, d: i64) -> Self {
        AffineExpr::CeilDiv(Box::new(e), d)
    }

    /// Evaluates the expression. Division by a non-positive constant is a
    /// validation error, so it is not checked here.
    pub fn eval(&self, ivars: &[i64], symbols: &[i64]) -> i64 {
        match self {
            AffineExpr::Const(c) => *c,
            AffineExpr::IndexVar(l) => ivars[*l],
            AffineExpr::Symbol(s) => symbols[*s],
            AffineExpr::Add(a, b) => a.eval(ivars, symbols) + b.eval(ivars, symbols),
            AffineExpr::Sub(a, b) => a.eval(ivars, symbols) - b.eval(ivars, symbols),
            AffineExpr::Scale(k, e) => k * e.eval(ivars, symbols),
            AffineExpr::FloorDiv(e, d) => floor_div(e.eval(ivars, symbols), *d),
            AffineExpr::CeilDiv(e, d) => ceil_div(e.eval(ivars, symbols), *d),
        }
    }

    /// Calls `f` on every node, parents before children.
    pub fn visit(&self, f: &mut impl FnMut(&AffineExpr)) {
        f(self);
        match self {
            AffineExpr::Add(a, b) | AffineExpr::Sub(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            AffineExpr::Scale(_, e) | AffineExpr::FloorDiv(e, _) | AffineExpr::CeilDiv(e, _) => e.visit(f),
            AffineExpr::Const(_) | AffineExpr::IndexVar(_) | AffineExpr::Symbol(_) => {}
        }
    }

    pub fn index_vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let AffineExpr::IndexVar(l) = e {
                out.insert(*l);
            }
        });
        out
    }

    pub fn symbols(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let AffineExpr::Symbol(s) = e {
                out.insert(*s);
            }
        });
        out
    }

    /// True when the expression mentions neither index variables nor symbols.
    pub fn is_constant(&self) -> bool {
        let mut c = true;
        self.visit(&mut |e| {
            if matches!(e, AffineExpr::IndexVar(_) | AffineExpr::Symbol(_)) {
                c = false;
            }
        });
        c
    }

    /// Equivalent expression with like terms collected: index variables by
    /// level, then symbols, then divisions, then the constant.
    pub fn simplify(&self) -> AffineExpr {
        let mut terms: Vec<(AffineExpr, i64)> = Vec::new();
        let mut constant = 0;
        self.collect(1, &mut terms, &mut constant);
        let rank = |e: &AffineExpr| match e {
            AffineExpr::IndexVar(l) => (0, *l),
            AffineExpr::Symbol(s) => (1, *s),
            _ => (2, 0),
        };
        terms.retain(|(_, k)| *k != 0);
        terms.sort_by_key(|(e, _)| rank(e));
        let mut out: Option<AffineExpr> = None;
        for (e, k) in terms {
            let mag = if k.abs() == 1 { e } else { AffineExpr::scale(k.abs(), e) };
            out = Some(match out {
                None if k < 0 => AffineExpr::scale(-1, mag),
                None => mag,
                Some(acc) if k < 0 => AffineExpr::minus(acc, mag),
                Some(acc) => AffineExpr::plus(acc, mag),
            });
        }
        match out {
            None => AffineExpr::Const(constant),
            Some(acc) if constant < 0 => AffineExpr::minus(acc, AffineExpr::Const(-constant)),
            Some(acc) if constant > 0 => AffineExpr::plus(acc, AffineExpr::Const(constant)),
            Some(acc) => acc,
        }
    }

    fn collect(&self, k: i64, terms: &mut Vec<(AffineExpr, i64)>, constant: &mut i64) {
        let mut push = |e: AffineExpr| match terms.iter_mut().find(|(t, _)| *t == e) {
            Some((_, c)) => *c += k,
            None => terms.push((e, k)),
        };
        match self {
            AffineExpr::Const(c) => *constant += k * c,
            AffineExpr::IndexVar(_) | AffineExpr::Symbol(_) => push(self.clone()),
            AffineExpr::Add(a, b) => {
                a.collect(k, terms, constant);
                b.collect(k, terms, constant);
            }
            AffineExpr::Sub(a, b) => {
                a.collect(k, terms, constant);
                b.collect(-k, terms, constant);
            }
            AffineExpr::Scale(s, e) => e.collect(k * s, terms, constant),
            AffineExpr::FloorDiv(e, d) => match e.simplify() {
                AffineExpr::Const(c) => *constant += k * floor_div(c, *d),
                s => push(AffineExpr::floor_div(s, *d)),
            },
            AffineExpr::CeilDiv(e, d) => match e.simplify() {
                AffineExpr::Const(c) => *constant += k * ceil_div(c, *d),
                s => push(AffineExpr::ceil_div(s, *d)),
            },
        }
    }
}

pub(crate) fn floor_div(a: i64, d: i64) -> i64 {
    a.div_euclid(d)
}

pub(crate) fn ceil_div(a: i64, d: i64) -> i64 {
    -(-a).div_euclid(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `expr = 0`
    Eq,
    /// `expr < 0`
    Lt,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub expr: AffineExpr,
    pub rel: Relation,
}

impl Constraint {
    pub fn holds(&self, ivars: &[i64], symbols: &[i64]) -> bool {
        let v = self.expr.eval(ivars, symbols);
        match self.rel {
            Relation::Eq => v == 0,
            Relation::Lt => v < 0,
        }
    }
}

/// Disjunction of conjunctions of affine constraints.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstraintSet {
    pub disjuncts: Vec<Vec<Constraint>>,
}

impl ConstraintSet {
    pub fn holds(&self, ivars: &[i64], symbols: &[i64]) -> bool {
        self.disjuncts
            .iter()
            .any(|conj| conj.iter().all(|c| c.holds(ivars, symbols)))
    }

    pub fn constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.disjuncts.iter().flatten()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Loop {
    /// Source name of the index variable; its level is the loop's nesting depth.
    pub var: String,
    pub lower: AffineExpr,
    pub upper: AffineExpr,
    pub step: i64,
    pub body: Box<Stmt>,
}

impl Loop {
    /// Half-open trip count `ceil((upper - lower) / step)`, clamped at zero.
    pub fn trip_count(&self, ivars: &[i64], symbols: &[i64]) -> i64 {
        let lo = self.lower.eval(ivars, symbols);
        let hi = self.upper.eval(ivars, symbols);
        ceil_div(hi - lo, self.step).max(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Access {
    pub array: ArrayId,
    pub subscripts: Vec<AffineExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Loop(Loop),
    Block(Vec<Stmt>),
    If {
        cond: ConstraintSet,
        then: Box<Stmt>,
        otherwise: Option<Box<Stmt>>,
    },
    Access(Access),
}

impl Stmt {
    /// Maximum number of nested loops along any path.
    pub fn loop_depth(&self) -> usize {
        match self {
            Stmt::Loop(l) => 1 + l.body.loop_depth(),
            Stmt::Block(stmts) => stmts.iter().map(Stmt::loop_depth).max().unwrap_or(0),
            Stmt::If { then, otherwise, .. } => then.loop_depth().max(otherwise.as_ref().map_or(0, |e| e.loop_depth())),
            Stmt::Access(_) => 0,
        }
    }

    /// Dimension of the timestamp vectors produced under this statement when
    /// it sits at vector position `level`.
    pub fn timestamp_dims(&self, level: usize) -> usize {
        match self {
            Stmt::Access(_) => level,
            Stmt::Loop(l) => l.body.timestamp_dims(level + 1),
            Stmt::Block(stmts) => stmts
                .iter()
                .map(|s| s.timestamp_dims(level + 1))
                .max()
                .unwrap_or(level + 1),
            Stmt::If { then, otherwise, .. } => then
                .timestamp_dims(level)
                .max(otherwise.as_ref().map_or(level, |e| e.timestamp_dims(level))),
        }
    }

    pub fn for_each_access(&self, f: &mut impl FnMut(&Access)) {
        match self {
            Stmt::Access(a) => f(a),
            Stmt::Loop(l) => l.body.for_each_access(f),
            Stmt::Block(stmts) => stmts.iter().for_each(|s| s.for_each_access(f)),
            Stmt::If { then, otherwise, .. } => {
                then.for_each_access(f);
                if let Some(e) = otherwise {
                    e.for_each_access(f);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArrayDecl {
    pub name: String,
    pub rank: usize,
    /// Extent per dimension, outermost first; may reference symbols only.
    /// `None` for arrays used without a declaration, whose extents are
    /// inferred from the accessed index range.
    pub dims: Option<Vec<AffineExpr>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineProgram {
    pub symbols: Vec<String>,
    pub arrays: Vec<ArrayDecl>,
    pub body: Stmt,
}

impl AffineProgram {
    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == name)
    }

    pub fn array_index(&self, name: &str) -> Option<ArrayId> {
        self.arrays.iter().position(|a| a.name == name)
    }

    pub fn loop_depth(&self) -> usize {
        self.body.loop_depth()
    }

    pub fn timestamp_dims(&self) -> usize {
        self.body.timestamp_dims(0)
    }

    /// Number of loop nests at the top level of the program. Programs with
    /// more than one are multi-phase and prone to the moving-cliff error.
    pub fn top_level_nests(&self) -> usize {
        match &self.body {
            Stmt::Block(stmts) => stmts.iter().filter(|s| s.loop_depth() > 0).count(),
            s if s.loop_depth() > 0 => 1,
            _ => 0,
        }
    }
}

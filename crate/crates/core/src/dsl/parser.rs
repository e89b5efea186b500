use super::ast::*;
use super::lexer::{lex, Pos, Tok, Token};
use super::{validate, DslError};

/// Parses and validates a program in the `.aff` format.
///
/// A program either declares its parameters and arrays up front (`params`
/// and `array` headers), or declares nothing at all, in which case free
/// identifiers become parameters and arrays are created on first use with
/// extents inferred at trace time.
pub fn parse_program(source: &str) -> Result<AffineProgram, DslError> {
    let tokens = lex(source)?;
    let mut p = Parser {
        toks: tokens,
        pos: 0,
        symbols: Vec::new(),
        arrays: Vec::new(),
        scope: Vec::new(),
        strict: false,
        in_division: false,
    };
    let prog = p.program()?;
    let diags = validate(&prog);
    if diags.is_empty() {
        Ok(prog)
    } else {
        Err(DslError::Invalid(diags))
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    symbols: Vec<String>,
    arrays: Vec<ArrayDecl>,
    scope: Vec<String>,
    strict: bool,
    /// Set while reading the numerator of `floor(e / c)` or `ceil(e / c)`.
    in_division: bool,
}

type Dnf = Vec<Vec<Constraint>>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> Pos {
        self.toks[self.pos].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> DslError {
        let pos = self.here();
        DslError::Syntax {
            line: pos.line,
            col: pos.col,
            expected: expected.to_string(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), DslError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{}`", t.spelling())))
        }
    }

    fn ident(&mut self) -> Result<String, DslError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn program(&mut self) -> Result<AffineProgram, DslError> {
        loop {
            match self.peek() {
                Tok::Params => {
                    self.strict = true;
                    self.bump();
                    loop {
                        let pos = self.here();
                        let name = self.ident()?;
                        if self.symbols.contains(&name) {
                            return Err(DslError::Syntax {
                                line: pos.line,
                                col: pos.col,
                                expected: "a fresh parameter name".into(),
                                found: format!("duplicate `{name}`"),
                            });
                        }
                        self.symbols.push(name);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.expect(Tok::Semi)?;
                }
                Tok::Array => {
                    self.strict = true;
                    self.bump();
                    let name = self.ident()?;
                    self.expect(Tok::LBracket)?;
                    let mut dims = vec![self.expr()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        dims.push(self.expr()?);
                    }
                    self.expect(Tok::RBracket)?;
                    self.expect(Tok::Semi)?;
                    self.arrays.push(ArrayDecl {
                        name,
                        rank: dims.len(),
                        dims: Some(dims),
                    });
                }
                _ => break,
            }
        }
        let mut stmts = Vec::new();
        while *self.peek() != Tok::Eof {
            stmts.push(self.stmt()?);
        }
        if stmts.is_empty() {
            return Err(self.unexpected("a statement"));
        }
        Ok(AffineProgram {
            symbols: std::mem::take(&mut self.symbols),
            arrays: std::mem::take(&mut self.arrays),
            body: wrap(stmts),
        })
    }

    fn body(&mut self) -> Result<Stmt, DslError> {
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while *self.peek() != Tok::RBrace {
            if *self.peek() == Tok::Eof {
                return Err(self.unexpected("`}`"));
            }
            stmts.push(self.stmt()?);
        }
        if stmts.is_empty() {
            return Err(self.unexpected("a statement"));
        }
        self.bump();
        Ok(wrap(stmts))
    }

    fn stmt(&mut self) -> Result<Stmt, DslError> {
        match self.peek() {
            Tok::For => self.for_loop(),
            Tok::If => self.if_stmt(),
            Tok::AccessKw => self.access(),
            Tok::LBrace => self.body(),
            _ => Err(self.unexpected("`for`, `if`, `access` or `{`")),
        }
    }

    fn for_loop(&mut self) -> Result<Stmt, DslError> {
        self.bump();
        let pos = self.here();
        let var = self.ident()?;
        if self.symbols.contains(&var) || self.arrays.iter().any(|a| a.name == var) {
            return Err(DslError::Syntax {
                line: pos.line,
                col: pos.col,
                expected: "an index variable name distinct from parameters and arrays".into(),
                found: format!("identifier `{var}`"),
            });
        }
        self.expect(Tok::Assign)?;
        let lower = self.expr()?;
        self.expect(Tok::To)?;
        let upper = self.expr()?;
        let step = if *self.peek() == Tok::Step {
            self.bump();
            let neg = if *self.peek() == Tok::Minus {
                self.bump();
                true
            } else {
                false
            };
            match self.peek().clone() {
                Tok::Int(v) => {
                    self.bump();
                    if neg {
                        -v
                    } else {
                        v
                    }
                }
                _ => return Err(self.unexpected("an integer step")),
            }
        } else {
            1
        };
        self.scope.push(var.clone());
        let body = self.body();
        self.scope.pop();
        Ok(Stmt::Loop(Loop {
            var,
            lower,
            upper,
            step,
            body: Box::new(body?),
        }))
    }

    fn if_stmt(&mut self) -> Result<Stmt, DslError> {
        self.bump();
        self.expect(Tok::LParen)?;
        let disjuncts = self.set()?;
        self.expect(Tok::RParen)?;
        let then = self.body()?;
        let otherwise = if *self.peek() == Tok::Else {
            self.bump();
            Some(Box::new(self.body()?))
        } else {
            None
        };
        Ok(Stmt::If {
            cond: ConstraintSet { disjuncts },
            then: Box::new(then),
            otherwise,
        })
    }

    fn access(&mut self) -> Result<Stmt, DslError> {
        self.bump();
        let pos = self.here();
        let name = self.ident()?;
        self.expect(Tok::LBracket)?;
        let mut subscripts = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            subscripts.push(self.expr()?);
        }
        self.expect(Tok::RBracket)?;
        self.expect(Tok::Semi)?;
        let array = match self.arrays.iter().position(|a| a.name == name) {
            Some(id) => id,
            None if !self.strict => {
                self.arrays.push(ArrayDecl {
                    name,
                    rank: subscripts.len(),
                    dims: None,
                });
                self.arrays.len() - 1
            }
            None => {
                return Err(DslError::Scope {
                    line: pos.line,
                    col: pos.col,
                    name,
                })
            }
        };
        Ok(Stmt::Access(Access { array, subscripts }))
    }

    fn set(&mut self) -> Result<Dnf, DslError> {
        let mut out = self.conj()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            out.extend(self.conj()?);
        }
        Ok(out)
    }

    fn conj(&mut self) -> Result<Dnf, DslError> {
        let mut out = self.atom()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            let rhs = self.atom()?;
            let mut next = Vec::with_capacity(out.len() * rhs.len());
            for a in &out {
                for b in &rhs {
                    let mut c = a.clone();
                    c.extend(b.iter().cloned());
                    next.push(c);
                }
            }
            out = next;
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<Dnf, DslError> {
        if *self.peek() == Tok::LParen {
            let save = self.pos;
            self.bump();
            if let Ok(inner) = self.set() {
                if *self.peek() == Tok::RParen
                    && matches!(self.peek_at(1), Tok::AndAnd | Tok::OrOr | Tok::RParen | Tok::Eof)
                {
                    self.bump();
                    return Ok(inner);
                }
            }
            self.pos = save;
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Dnf, DslError> {
        let lhs = self.expr()?;
        let op = self.peek().clone();
        if !matches!(op, Tok::EqEq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge) {
            return Err(self.unexpected("a comparison operator"));
        }
        self.bump();
        let rhs = self.expr()?;
        let lt = |e| Constraint {
            expr: e,
            rel: Relation::Lt,
        };
        let minus_one = |e| AffineExpr::minus(e, AffineExpr::Const(1));
        Ok(match op {
            Tok::EqEq => vec![vec![Constraint {
                expr: diff(lhs, rhs),
                rel: Relation::Eq,
            }]],
            Tok::Lt => vec![vec![lt(diff(lhs, rhs))]],
            Tok::Le => vec![vec![lt(minus_one(diff(lhs, rhs)))]],
            Tok::Gt => vec![vec![lt(diff(rhs, lhs))]],
            Tok::Ge => vec![vec![lt(minus_one(diff(rhs, lhs)))]],
            Tok::Ne => vec![vec![lt(diff(lhs.clone(), rhs.clone()))], vec![lt(diff(rhs, lhs))]],
            _ => unreachable!(),
        })
    }

    fn expr(&mut self) -> Result<AffineExpr, DslError> {
        let mut e = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    e = AffineExpr::plus(e, self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    e = AffineExpr::minus(e, self.term()?);
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self) -> Result<AffineExpr, DslError> {
        let mut e = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    let pos = self.here();
                    self.bump();
                    let rhs = self.factor()?;
                    e = multiply(e, rhs, pos)?;
                }
                Tok::Slash if self.in_division => return Ok(e),
                Tok::Slash => return Err(self.unexpected("`floor(e / c)` or `ceil(e / c)` for division")),
                _ => return Ok(e),
            }
        }
    }

    fn factor(&mut self) -> Result<AffineExpr, DslError> {
        let pos = self.here();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(AffineExpr::Const(v))
            }
            Tok::Minus => {
                self.bump();
                Ok(match self.factor()? {
                    AffineExpr::Const(v) => AffineExpr::Const(-v),
                    e => AffineExpr::scale(-1, e),
                })
            }
            Tok::LParen => {
                self.bump();
                let outer = std::mem::replace(&mut self.in_division, false);
                let e = self.expr();
                self.in_division = outer;
                let e = e?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Floor | Tok::Ceil => {
                let is_floor = *self.peek() == Tok::Floor;
                self.bump();
                self.expect(Tok::LParen)?;
                let outer = std::mem::replace(&mut self.in_division, true);
                let e = self.expr();
                self.in_division = outer;
                let e = e?;
                self.expect(Tok::Slash)?;
                let dpos = self.here();
                let d = self.factor()?;
                self.expect(Tok::RParen)?;
                let d = match d {
                    d if !d.is_constant() => return Err(non_affine(dpos, "variable denominator in division")),
                    d => d.eval(&[], &[]),
                };
                if d <= 0 {
                    return Err(non_affine(dpos, "division by a non-positive constant"));
                }
                Ok(if is_floor {
                    AffineExpr::floor_div(e, d)
                } else {
                    AffineExpr::ceil_div(e, d)
                })
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(level) = self.scope.iter().rposition(|v| *v == name) {
                    return Ok(AffineExpr::IndexVar(level));
                }
                if let Some(s) = self.symbols.iter().position(|v| *v == name) {
                    return Ok(AffineExpr::Symbol(s));
                }
                if self.strict {
                    return Err(DslError::Scope {
                        line: pos.line,
                        col: pos.col,
                        name,
                    });
                }
                self.symbols.push(name);
                Ok(AffineExpr::Symbol(self.symbols.len() - 1))
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

fn wrap(mut stmts: Vec<Stmt>) -> Stmt {
    if stmts.len() == 1 {
        stmts.pop().unwrap()
    } else {
        Stmt::Block(stmts)
    }
}

fn diff(a: AffineExpr, b: AffineExpr) -> AffineExpr {
    if b == AffineExpr::Const(0) {
        a
    } else {
        AffineExpr::minus(a, b)
    }
}

fn non_affine(pos: Pos, reason: &str) -> DslError {
    DslError::NonAffine {
        line: pos.line,
        col: pos.col,
        reason: reason.to_string(),
    }
}

fn multiply(a: AffineExpr, b: AffineExpr, pos: Pos) -> Result<AffineExpr, DslError> {
    if let AffineExpr::Const(k) = a {
        return Ok(AffineExpr::scale(k, b));
    }
    if let AffineExpr::Const(k) = b {
        return Ok(AffineExpr::scale(k, a));
    }
    if a.is_constant() {
        return Ok(AffineExpr::scale(a.eval(&[], &[]), b));
    }
    if b.is_constant() {
        return Ok(AffineExpr::scale(b.eval(&[], &[]), a));
    }
    let ivars = !a.index_vars().is_empty() || !b.index_vars().is_empty();
    let syms = !a.symbols().is_empty() || !b.symbols().is_empty();
    let reason = if ivars && syms {
        "parameter used as a coefficient of an index variable"
    } else if syms {
        "product of parameters"
    } else {
        "product of index variables"
    };
    Err(non_affine(pos, reason))
}

//! Assertion expressions: surface syntax and name/type resolution.

use super::lexer::{Cursor, PResult, Tok};
use super::SourceDiagnostic;
use crate::contract::{BinOp, ContractClass, Expr, FeatureKind, ObjRef, SeqOp, ValueSort};

pub const EXPR_KEYWORDS: &[&str] = &[
    "not", "and", "or", "then", "else", "implies", "old", "true", "false", "Result", "Current",
    "other", "across", "as", "all", "end",
];

#[derive(Debug, Clone)]
pub struct SExpr {
    pub kind: SKind,
    pub line: usize,
    pub column: usize,
    pub token: String,
}

#[derive(Debug, Clone)]
pub enum SKind {
    Bool(bool),
    Int(i64),
    Elem(u32),
    Name(String),
    Current,
    Other,
    Result,
    Dot(Box<SExpr>, String, Option<Vec<SExpr>>),
    Index(Box<SExpr>, Box<SExpr>),
    Old(Box<SExpr>),
    Not(Box<SExpr>),
    Bin(BinOp, Box<SExpr>, Box<SExpr>),
    Across {
        var: String,
        lo: Box<SExpr>,
        hi: Box<SExpr>,
        body: Box<SExpr>,
    },
}

impl SExpr {
    fn error(&self, message: &str) -> SourceDiagnostic {
        SourceDiagnostic::error(self.line, self.column, message, &self.token)
    }
}

/// Component names that take an argument list after a dot.
const WITH_ARGS: &[&str] = &["extended", "is_equal"];

pub struct ExprParser<'a> {
    /// Host keywords that end an expression.
    pub reserved: &'a [&'a str],
}

impl ExprParser<'_> {
    fn is_reserved(&self, w: &str) -> bool {
        EXPR_KEYWORDS.contains(&w) || self.reserved.contains(&w)
    }

    fn node(cur: &Cursor, kind: SKind) -> SExpr {
        let t = cur.peek();
        SExpr {
            kind,
            line: t.line,
            column: t.column,
            token: t.tok.text(),
        }
    }

    fn wrap(at: &SExpr, kind: SKind) -> SExpr {
        SExpr {
            kind,
            line: at.line,
            column: at.column,
            token: at.token.clone(),
        }
    }

    pub fn expr(&self, cur: &mut Cursor) -> PResult<SExpr> {
        let lhs = self.or(cur)?;
        if cur.is_word("implies") {
            let op = cur.peek().clone();
            cur.next();
            let rhs = self.expr(cur)?;
            return Ok(SExpr {
                kind: SKind::Bin(BinOp::Implies, Box::new(lhs), Box::new(rhs)),
                line: op.line,
                column: op.column,
                token: op.tok.text(),
            });
        }
        Ok(lhs)
    }

    fn or(&self, cur: &mut Cursor) -> PResult<SExpr> {
        let mut lhs = self.and(cur)?;
        while cur.is_word("or") {
            cur.next();
            cur.eat_word("else");
            let rhs = self.and(cur)?;
            lhs = Self::wrap(
                &lhs.clone(),
                SKind::Bin(BinOp::Or, Box::new(lhs), Box::new(rhs)),
            );
        }
        Ok(lhs)
    }

    fn and(&self, cur: &mut Cursor) -> PResult<SExpr> {
        let mut lhs = self.not(cur)?;
        while cur.is_word("and") {
            cur.next();
            cur.eat_word("then");
            let rhs = self.not(cur)?;
            lhs = Self::wrap(
                &lhs.clone(),
                SKind::Bin(BinOp::And, Box::new(lhs), Box::new(rhs)),
            );
        }
        Ok(lhs)
    }

    fn not(&self, cur: &mut Cursor) -> PResult<SExpr> {
        if cur.is_word("not") {
            let at = Self::node(cur, SKind::Bool(true));
            cur.next();
            let inner = self.not(cur)?;
            return Ok(Self::wrap(&at, SKind::Not(Box::new(inner))));
        }
        self.comparison(cur)
    }

    fn comparison_op(cur: &Cursor) -> Option<BinOp> {
        match cur.peek().tok {
            Tok::Sym("=") => Some(BinOp::Eq),
            Tok::Sym("/=") => Some(BinOp::Ne),
            Tok::Sym("<") => Some(BinOp::Lt),
            Tok::Sym("<=") => Some(BinOp::Le),
            Tok::Sym(">") => Some(BinOp::Gt),
            Tok::Sym(">=") => Some(BinOp::Ge),
            _ => None,
        }
    }

    fn comparison(&self, cur: &mut Cursor) -> PResult<SExpr> {
        let lhs = self.additive(cur)?;
        let Some(op) = Self::comparison_op(cur) else {
            return Ok(lhs);
        };
        let at = Self::node(cur, SKind::Bool(true));
        cur.next();
        let rhs = self.additive(cur)?;
        if Self::comparison_op(cur).is_some() {
            return Err(cur.error_here("comparisons do not chain; add parentheses"));
        }
        Ok(Self::wrap(
            &at,
            SKind::Bin(op, Box::new(lhs), Box::new(rhs)),
        ))
    }

    fn additive(&self, cur: &mut Cursor) -> PResult<SExpr> {
        let mut lhs = self.unary(cur)?;
        loop {
            let op = match cur.peek().tok {
                Tok::Sym("+") => BinOp::Add,
                Tok::Sym("-") => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let at = Self::node(cur, SKind::Bool(true));
            cur.next();
            let rhs = self.unary(cur)?;
            lhs = Self::wrap(&at, SKind::Bin(op, Box::new(lhs), Box::new(rhs)));
        }
    }

    fn unary(&self, cur: &mut Cursor) -> PResult<SExpr> {
        if cur.is_word("old") {
            let at = Self::node(cur, SKind::Bool(true));
            cur.next();
            let inner = self.postfix(cur)?;
            return Ok(Self::wrap(&at, SKind::Old(Box::new(inner))));
        }
        self.postfix(cur)
    }

    fn postfix(&self, cur: &mut Cursor) -> PResult<SExpr> {
        let mut e = self.atom(cur)?;
        loop {
            if cur.is_sym(".") {
                cur.next();
                let at = Self::node(cur, SKind::Bool(true));
                let name = match &cur.peek().tok {
                    Tok::Ident(n) => n.clone(),
                    other => {
                        return Err(cur.error_here(&format!(
                            "expected a component name, found `{}`",
                            other.text()
                        )))
                    }
                };
                cur.next();
                let args = if WITH_ARGS.contains(&name.as_str()) && cur.eat_sym("(") {
                    let mut args = vec![self.expr(cur)?];
                    while cur.eat_sym(",") {
                        args.push(self.expr(cur)?);
                    }
                    cur.expect_sym(")")?;
                    Some(args)
                } else {
                    None
                };
                e = Self::wrap(&at, SKind::Dot(Box::new(e), name, args));
            } else if cur.is_sym("[") {
                let at = Self::node(cur, SKind::Bool(true));
                cur.next();
                let idx = self.expr(cur)?;
                cur.expect_sym("]")?;
                e = Self::wrap(&at, SKind::Index(Box::new(e), Box::new(idx)));
            } else {
                return Ok(e);
            }
        }
    }

    fn atom(&self, cur: &mut Cursor) -> PResult<SExpr> {
        let tok = cur.peek().clone();
        let kind = match &tok.tok {
            Tok::Int(i) => SKind::Int(*i),
            Tok::Elem(j) => SKind::Elem(*j),
            Tok::Sym("(") => {
                cur.next();
                let e = self.expr(cur)?;
                cur.expect_sym(")")?;
                return Ok(e);
            }
            Tok::Ident(w) => match w.as_str() {
                "true" => SKind::Bool(true),
                "false" => SKind::Bool(false),
                "Result" => SKind::Result,
                "Current" => SKind::Current,
                "other" => SKind::Other,
                "across" => return self.across(cur),
                w if self.is_reserved(w) => {
                    return Err(
                        cur.error_here(&format!("expected an expression, found keyword `{w}`"))
                    );
                }
                w => SKind::Name(w.to_string()),
            },
            other => {
                return Err(
                    cur.error_here(&format!("expected an expression, found `{}`", other.text()))
                )
            }
        };
        let node = Self::node(cur, kind);
        cur.next();
        Ok(node)
    }

    fn across(&self, cur: &mut Cursor) -> PResult<SExpr> {
        let at = Self::node(cur, SKind::Bool(true));
        cur.next();
        let lo = self.additive(cur)?;
        if !cur.eat_sym("|..|") && !cur.eat_sym("..") {
            return Err(cur.error_here("expected `..` in `across` range"));
        }
        let hi = self.additive(cur)?;
        let var = if cur.eat_word("as") {
            let (v, _) =
                cur.expect_ident("a loop variable", &[EXPR_KEYWORDS, self.reserved].concat())?;
            v
        } else {
            "i".to_string()
        };
        cur.expect_word("all", "`all`")?;
        let body = self.expr(cur)?;
        cur.expect_word("end", "`end` closing `across`")?;
        Ok(Self::wrap(
            &at,
            SKind::Across {
                var,
                lo: Box::new(lo),
                hi: Box::new(hi),
                body: Box::new(body),
            },
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ty {
    Bool,
    Int,
    Elem,
    Seq,
    Obj,
}

impl Ty {
    fn of(sort: ValueSort) -> Ty {
        match sort {
            ValueSort::Element => Ty::Elem,
            ValueSort::Boolean => Ty::Bool,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Ty::Bool => "BOOLEAN",
            Ty::Int => "INTEGER",
            Ty::Elem => "an element",
            Ty::Seq => "a sequence",
            Ty::Obj => "an object",
        }
    }
}

/// What names an expression may refer to.
pub struct Scope<'a> {
    pub class: &'a ContractClass,
    /// Inside the class: bare component names read `Current`.
    pub current: bool,
    /// Inside the equality definition.
    pub other: bool,
    /// Driver objects.
    pub objects: &'a [String],
    pub params: &'a [(String, ValueSort)],
    pub old: bool,
    pub result: Option<ValueSort>,
}

impl Scope<'_> {
    /// Resolves a boolean assertion.
    pub fn assertion(&self, e: &SExpr) -> PResult<Expr> {
        let (x, ty) = self.resolve(e, &mut vec![], false)?;
        if ty != Ty::Bool {
            return Err(e.error(&format!(
                "expected a boolean assertion, found {}",
                ty.name()
            )));
        }
        Ok(x)
    }

    /// Resolves an element-valued argument.
    pub fn element(&self, e: &SExpr) -> PResult<Expr> {
        let (x, ty) = self.resolve(e, &mut vec![], false)?;
        if ty != Ty::Elem {
            return Err(e.error(&format!("expected an element, found {}", ty.name())));
        }
        Ok(x)
    }

    fn object_ref(&self, e: &SExpr, locals: &[String]) -> PResult<Option<ObjRef>> {
        Ok(match &e.kind {
            SKind::Current if self.current => Some(ObjRef::Current),
            SKind::Current => return Err(e.error("`Current` is not available here")),
            SKind::Other if self.other => Some(ObjRef::Other),
            SKind::Other => {
                return Err(e.error("`other` is only available in the equality definition"))
            }
            SKind::Name(n) if !locals.contains(n) && !self.params.iter().any(|(p, _)| p == n) => {
                self.objects.contains(n).then(|| ObjRef::Named(n.clone()))
            }
            _ => None,
        })
    }

    fn component(&self, target: ObjRef, name: &str, at: &SExpr) -> PResult<(Expr, Ty)> {
        if self.class.model_index(name).is_some() {
            return Ok((Expr::read(target, name), Ty::Seq));
        }
        match self.class.feature(name).map(|f| f.kind) {
            Some(FeatureKind::Query(sort)) => Ok((Expr::read(target, name), Ty::of(sort))),
            Some(FeatureKind::Command) => {
                Err(at.error(&format!("command `{name}` cannot be used in an expression")))
            }
            None => Err(at.error(&format!("unknown component `{name}`"))),
        }
    }

    fn resolve(&self, e: &SExpr, locals: &mut Vec<String>, in_old: bool) -> PResult<(Expr, Ty)> {
        Ok(match &e.kind {
            SKind::Bool(b) => (Expr::Bool(*b), Ty::Bool),
            SKind::Int(i) => (Expr::Int(*i), Ty::Int),
            SKind::Elem(j) => (Expr::Elem(*j), Ty::Elem),
            SKind::Result => match self.result {
                Some(sort) => (Expr::Result, Ty::of(sort)),
                None => return Err(e.error("`Result` is only allowed in query postconditions")),
            },
            SKind::Current | SKind::Other => {
                let r = self.object_ref(e, locals)?.expect("object");
                (Expr::Object(r), Ty::Obj)
            }
            SKind::Name(n) => {
                if locals.contains(n) {
                    (Expr::Var(n.clone()), Ty::Int)
                } else if let Some((_, sort)) = self.params.iter().find(|(p, _)| p == n) {
                    (Expr::Var(n.clone()), Ty::of(*sort))
                } else if self.objects.contains(n) {
                    (Expr::Object(ObjRef::Named(n.clone())), Ty::Obj)
                } else if self.current {
                    self.component(ObjRef::Current, n, e)?
                } else {
                    return Err(e.error(&format!("unknown name `{n}`")));
                }
            }
            SKind::Dot(base, name, args) => {
                if let Some(target) = self.object_ref(base, locals)? {
                    if name == "is_equal" {
                        let arg = match args.as_deref() {
                            Some([a]) => a,
                            _ => return Err(e.error("`is_equal` takes one object argument")),
                        };
                        let Some(other) = self.object_ref(arg, locals)? else {
                            return Err(arg.error("`is_equal` takes one object argument"));
                        };
                        return Ok((Expr::IsEqual(target, other), Ty::Bool));
                    }
                    if args.is_some() {
                        return Err(e.error(&format!("`{name}` takes no arguments")));
                    }
                    return self.component(target, name, e);
                }
                if let SKind::Name(v) = &base.kind {
                    if locals.contains(v) && name == "item" {
                        return Ok((Expr::Var(v.clone()), Ty::Int));
                    }
                }
                let (b, bty) = self.resolve(base, locals, in_old)?;
                if bty != Ty::Seq {
                    return Err(e.error(&format!("`.{name}` applied to {}", bty.name())));
                }
                let Some(op) = SeqOp::from_name(name) else {
                    return Err(e.error(&format!("unknown sequence operation `{name}`")));
                };
                match (op, args.as_deref()) {
                    (SeqOp::Extended, Some([a])) => {
                        let (x, xty) = self.resolve(a, locals, in_old)?;
                        if xty != Ty::Elem {
                            return Err(a.error(&format!(
                                "`extended` takes an element, found {}",
                                xty.name()
                            )));
                        }
                        (Expr::Seq(op, Box::new(b), Some(Box::new(x))), Ty::Seq)
                    }
                    (SeqOp::Extended, _) => {
                        return Err(e.error("`extended` takes one element argument"))
                    }
                    (_, Some(_)) => return Err(e.error(&format!("`{name}` takes no arguments"))),
                    (op, None) => {
                        let ty = match op {
                            SeqOp::ButLast => Ty::Seq,
                            SeqOp::Last => Ty::Elem,
                            SeqOp::IsEmpty => Ty::Bool,
                            SeqOp::Count => Ty::Int,
                            SeqOp::Extended => unreachable!(),
                        };
                        (Expr::Seq(op, Box::new(b), None), ty)
                    }
                }
            }
            SKind::Index(s, i) => {
                let (sx, sty) = self.resolve(s, locals, in_old)?;
                if sty != Ty::Seq {
                    return Err(s.error(&format!("indexing applied to {}", sty.name())));
                }
                let (ix, ity) = self.resolve(i, locals, in_old)?;
                if ity != Ty::Int {
                    return Err(i.error(&format!("index must be an integer, found {}", ity.name())));
                }
                (Expr::Index(Box::new(sx), Box::new(ix)), Ty::Elem)
            }
            SKind::Old(inner) => {
                if !self.old {
                    return Err(e.error("`old` is only allowed in command postconditions"));
                }
                if in_old {
                    return Err(e.error("nested `old`"));
                }
                let (x, ty) = self.resolve(inner, locals, true)?;
                (Expr::Old(Box::new(x)), ty)
            }
            SKind::Not(inner) => {
                let (x, ty) = self.resolve(inner, locals, in_old)?;
                if ty != Ty::Bool {
                    return Err(inner.error(&format!("`not` applied to {}", ty.name())));
                }
                (Expr::negate(x), Ty::Bool)
            }
            SKind::Bin(op, a, b) => {
                let (ax, aty) = self.resolve(a, locals, in_old)?;
                let (bx, bty) = self.resolve(b, locals, in_old)?;
                let want = |ok: bool, what: &str| -> PResult<()> {
                    if ok {
                        Ok(())
                    } else {
                        Err(e.error(&format!(
                            "`{}` needs {what}, found {} and {}",
                            op.symbol(),
                            aty.name(),
                            bty.name()
                        )))
                    }
                };
                let ty = match op {
                    BinOp::And | BinOp::Or | BinOp::Implies => {
                        want(aty == Ty::Bool && bty == Ty::Bool, "booleans")?;
                        Ty::Bool
                    }
                    BinOp::Eq | BinOp::Ne => {
                        want(aty == bty, "operands of the same type")?;
                        Ty::Bool
                    }
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        want(aty == Ty::Int && bty == Ty::Int, "integers")?;
                        Ty::Bool
                    }
                    BinOp::Add | BinOp::Sub => {
                        want(aty == Ty::Int && bty == Ty::Int, "integers")?;
                        Ty::Int
                    }
                };
                (Expr::bin(*op, ax, bx), ty)
            }
            SKind::Across { var, lo, hi, body } => {
                let (lx, lty) = self.resolve(lo, locals, in_old)?;
                let (hx, hty) = self.resolve(hi, locals, in_old)?;
                if lty != Ty::Int || hty != Ty::Int {
                    return Err(e.error("`across` bounds must be integers"));
                }
                if self.params.iter().any(|(p, _)| p == var) || self.objects.contains(var) {
                    return Err(e.error(&format!("loop variable `{var}` shadows a parameter")));
                }
                locals.push(var.clone());
                let r = self.resolve(body, locals, in_old);
                locals.pop();
                let (bx, bty) = r?;
                if bty != Ty::Bool {
                    return Err(body.error("`across` body must be boolean"));
                }
                (
                    Expr::Across {
                        var: var.clone(),
                        lo: Box::new(lx),
                        hi: Box::new(hx),
                        body: Box::new(bx),
                    },
                    Ty::Bool,
                )
            }
        })
    }
}

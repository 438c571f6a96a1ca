use std::fmt;

/// An object reference inside an assertion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjRef {
    Current,
    /// The argument of `is_equal` inside an equality definition.
    Other,
    /// A driver object.
    Named(String),
}

impl ObjRef {
    /// Name the object is bound under in an [`super::Environment`].
    pub fn binding(&self) -> &str {
        match self {
            ObjRef::Current => "Current",
            ObjRef::Other => "other",
            ObjRef::Named(n) => n,
        }
    }
}

impl fmt::Display for ObjRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.binding())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeqOp {
    Extended,
    ButLast,
    Last,
    IsEmpty,
    Count,
}

impl SeqOp {
    pub fn name(self) -> &'static str {
        match self {
            SeqOp::Extended => "extended",
            SeqOp::ButLast => "but_last",
            SeqOp::Last => "last",
            SeqOp::IsEmpty => "is_empty",
            SeqOp::Count => "count",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "extended" => SeqOp::Extended,
            "but_last" => SeqOp::ButLast,
            "last" => SeqOp::Last,
            "is_empty" => SeqOp::IsEmpty,
            "count" => SeqOp::Count,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Implies,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "and",
            BinOp::Or => "or",
            BinOp::Implies => "implies",
            BinOp::Eq => "=",
            BinOp::Ne => "/=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Implies => 1,
            BinOp::Or => 2,
            BinOp::And => 3,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 5,
            BinOp::Add | BinOp::Sub => 6,
        }
    }
}

/// Resolved, well-typed assertion expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Bool(bool),
    Int(i64),
    /// Element literal `#j`, the j-th element of the finite domain.
    Elem(u32),
    /// Feature or driver parameter, or an `across` variable.
    Var(String),
    Result,
    Object(ObjRef),
    /// Query or model field of an object.
    Read {
        target: ObjRef,
        name: String,
    },
    Old(Box<Expr>),
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Seq(SeqOp, Box<Expr>, Option<Box<Expr>>),
    /// One-based sequence indexing.
    Index(Box<Expr>, Box<Expr>),
    Across {
        var: String,
        lo: Box<Expr>,
        hi: Box<Expr>,
        body: Box<Expr>,
    },
    IsEqual(ObjRef, ObjRef),
}

impl Expr {
    pub fn read(target: ObjRef, name: &str) -> Self {
        Expr::Read {
            target,
            name: name.to_string(),
        }
    }

    pub fn named(obj: &str, name: &str) -> Self {
        Expr::read(ObjRef::Named(obj.to_string()), name)
    }

    pub fn var(name: &str) -> Self {
        Expr::Var(name.to_string())
    }

    pub fn negate(e: Expr) -> Self {
        Expr::Not(Box::new(e))
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Self {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn is_equal(a: &str, b: &str) -> Self {
        Expr::IsEqual(ObjRef::Named(a.to_string()), ObjRef::Named(b.to_string()))
    }

    pub fn distinct(a: &str, b: &str) -> Self {
        Expr::bin(
            BinOp::Ne,
            Expr::Object(ObjRef::Named(a.to_string())),
            Expr::Object(ObjRef::Named(b.to_string())),
        )
    }

    fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Bool(_)
            | Expr::Int(_)
            | Expr::Elem(_)
            | Expr::Var(_)
            | Expr::Result
            | Expr::Object(_)
            | Expr::Read { .. }
            | Expr::IsEqual(..) => vec![],
            Expr::Old(e) | Expr::Not(e) => vec![e],
            Expr::Binary(_, a, b) | Expr::Index(a, b) => vec![a, b],
            Expr::Seq(_, s, arg) => std::iter::once(&**s).chain(arg.as_deref()).collect(),
            Expr::Across { lo, hi, body, .. } => vec![lo, hi, body],
        }
    }

    /// Pre-order walk.
    pub fn any(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any(pred))
    }

    pub fn uses_is_equal(&self) -> bool {
        self.any(&|e| matches!(e, Expr::IsEqual(..)))
    }

    pub fn max_element_literal(&self) -> Option<u32> {
        let own = match self {
            Expr::Elem(j) => Some(*j),
            _ => None,
        };
        self.children()
            .into_iter()
            .filter_map(Expr::max_element_literal)
            .chain(own)
            .max()
    }

    /// Object names mentioned, in order of first occurrence.
    pub fn objects(&self) -> Vec<String> {
        fn walk(e: &Expr, out: &mut Vec<String>) {
            let mut push = |r: &ObjRef| {
                if let ObjRef::Named(n) = r {
                    if !out.contains(n) {
                        out.push(n.clone());
                    }
                }
            };
            match e {
                Expr::Object(r) | Expr::Read { target: r, .. } => push(r),
                Expr::IsEqual(a, b) => {
                    push(a);
                    push(b);
                }
                _ => {}
            }
            for c in e.children() {
                walk(c, out);
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Not(_) => 4,
            Expr::Old(_) => 8,
            _ => 9,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_inner(f)?;
            return f.write_str(")");
        }
        self.fmt_inner(f)
    }

    fn fmt_inner(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Int(i) => write!(f, "{i}"),
            Expr::Elem(j) => write!(f, "#{j}"),
            Expr::Var(v) => f.write_str(v),
            Expr::Result => f.write_str("Result"),
            Expr::Object(r) => write!(f, "{r}"),
            Expr::Read { target, name } => {
                if *target != ObjRef::Current {
                    write!(f, "{target}.")?;
                }
                f.write_str(name)
            }
            Expr::Old(e) => {
                f.write_str("old ")?;
                e.fmt_prec(f, 9)
            }
            Expr::Not(e) => {
                f.write_str("not ")?;
                e.fmt_prec(f, 4)
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                let (lp, rp) = match op {
                    BinOp::Implies => (p + 1, p),
                    BinOp::And | BinOp::Or | BinOp::Add | BinOp::Sub => (p, p + 1),
                    _ => (p + 1, p + 1),
                };
                a.fmt_prec(f, lp)?;
                write!(f, " {} ", op.symbol())?;
                b.fmt_prec(f, rp)
            }
            Expr::Seq(op, s, arg) => {
                s.fmt_prec(f, 9)?;
                write!(f, ".{}", op.name())?;
                if let Some(a) = arg {
                    f.write_str("(")?;
                    a.fmt_prec(f, 0)?;
                    f.write_str(")")?;
                }
                Ok(())
            }
            Expr::Index(s, i) => {
                s.fmt_prec(f, 9)?;
                f.write_str("[")?;
                i.fmt_prec(f, 0)?;
                f.write_str("]")
            }
            Expr::Across { var, lo, hi, body } => {
                f.write_str("across ")?;
                lo.fmt_prec(f, 6)?;
                f.write_str(" .. ")?;
                hi.fmt_prec(f, 6)?;
                write!(f, " as {var} all ")?;
                body.fmt_prec(f, 0)?;
                f.write_str(" end")
            }
            Expr::IsEqual(a, b) => write!(f, "{a}.is_equal({b})"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

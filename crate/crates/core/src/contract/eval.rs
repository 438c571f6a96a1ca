use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::state::{equality_holds, ObjectState};
use super::{BinOp, ContractClass, Expr, ObjRef, SeqOp, ValueSort};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Elem(u8),
    Seq(Vec<u8>),
    /// Object identity.
    Obj(usize),
    /// Result of reading outside a partial operation's domain.
    Undef,
}

impl Value {
    pub fn from_slot(sort: ValueSort, raw: u8) -> Value {
        match sort {
            ValueSort::Element => Value::Elem(raw),
            ValueSort::Boolean => Value::Bool(raw != 0),
        }
    }

    /// Raw slot encoding of an element or boolean value.
    pub fn as_slot(&self) -> Option<u8> {
        match self {
            Value::Elem(e) => Some(*e),
            Value::Bool(b) => Some(u8::from(*b)),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Elem(e) => write!(f, "e{e}"),
            Value::Seq(s) => {
                f.write_str("[")?;
                for (i, e) in s.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "e{e}")?;
                }
                f.write_str("]")
            }
            Value::Obj(id) => write!(f, "#{id}"),
            Value::Undef => f.write_str("undefined"),
        }
    }
}

/// Object names bound to identities, identities bound to abstract states
/// (`None` until created), and parameter values.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Environment {
    pub bindings: BTreeMap<String, usize>,
    pub states: Vec<Option<ObjectState>>,
    pub params: BTreeMap<String, Value>,
}

impl Environment {
    /// Environment where `Current` denotes `state`.
    pub fn current(state: ObjectState) -> Self {
        let mut env = Environment::default();
        env.bind_new("Current", Some(state));
        env
    }

    /// Binds `name` to a fresh identity.
    pub fn bind_new(&mut self, name: &str, state: Option<ObjectState>) -> usize {
        let id = self.states.len();
        self.states.push(state);
        self.bindings.insert(name.to_string(), id);
        id
    }

    pub fn state_of(&self, name: &str) -> Option<&ObjectState> {
        self.bindings
            .get(name)
            .and_then(|id| self.states.get(*id))
            .and_then(Option::as_ref)
    }

    /// Scope for evaluating a feature's assertions with `Current` denoting
    /// identity `id` and the formals bound to `args`.
    pub fn call_scope(&self, id: usize, args: BTreeMap<String, Value>) -> Environment {
        let mut bindings = BTreeMap::new();
        bindings.insert("Current".to_string(), id);
        Environment {
            bindings,
            states: self.states.clone(),
            params: args,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    /// A malformed expression reached evaluation.
    #[error("type error: {0}")]
    Type(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedRead {
    pub object: String,
    pub query: String,
}

/// Side observations of one evaluation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalNotes {
    /// An undefined value was produced and poisoned a comparison.
    pub undefined: bool,
    /// Queries read outside their precondition.
    pub masked_reads: Vec<MaskedRead>,
}

/// Evaluates `e`; see [`Evaluator`].
pub fn eval_expr(
    class: &ContractClass,
    e: &Expr,
    env: &Environment,
    old_env: Option<&Environment>,
    result: Option<&Value>,
) -> Result<Value, EvalError> {
    Evaluator::new(class).eval(e, env, old_env, result)
}

pub fn eval_expr_noted(
    class: &ContractClass,
    e: &Expr,
    env: &Environment,
    old_env: Option<&Environment>,
    result: Option<&Value>,
) -> Result<(Value, EvalNotes), EvalError> {
    let mut ev = Evaluator::new(class);
    let v = ev.eval(e, env, old_env, result)?;
    Ok((v, ev.notes))
}

/// Two-valued assertion evaluator.
///
/// Indexing outside a sequence, `last`/`but_last` of an empty sequence,
/// `old` without a pre-state and reads of a query whose precondition does
/// not hold all produce [`Value::Undef`]. Undefined operands make every
/// comparison and boolean test false.
pub struct Evaluator<'a> {
    class: &'a ContractClass,
    /// Skip query-precondition checks on reads (used while evaluating
    /// query preconditions themselves).
    raw: bool,
    pub notes: EvalNotes,
}

struct Frame<'e> {
    env: &'e Environment,
    old: Option<&'e Environment>,
    result: Option<&'e Value>,
}

impl<'a> Evaluator<'a> {
    pub fn new(class: &'a ContractClass) -> Self {
        Evaluator {
            class,
            raw: false,
            notes: EvalNotes::default(),
        }
    }

    pub fn raw(class: &'a ContractClass) -> Self {
        Evaluator {
            class,
            raw: true,
            notes: EvalNotes::default(),
        }
    }

    pub fn eval(
        &mut self,
        e: &Expr,
        env: &Environment,
        old: Option<&Environment>,
        result: Option<&Value>,
    ) -> Result<Value, EvalError> {
        let frame = Frame { env, old, result };
        let mut locals = Vec::new();
        self.ev(e, &frame, &mut locals)
    }

    /// Evaluates a boolean assertion; undefined counts as false.
    pub fn holds(
        &mut self,
        e: &Expr,
        env: &Environment,
        old: Option<&Environment>,
        result: Option<&Value>,
    ) -> Result<bool, EvalError> {
        let v = self.eval(e, env, old, result)?;
        self.truth(v)
    }

    fn truth(&mut self, v: Value) -> Result<bool, EvalError> {
        match v {
            Value::Bool(b) => Ok(b),
            Value::Undef => {
                self.notes.undefined = true;
                Ok(false)
            }
            other => Err(EvalError::Type(format!(
                "expected a boolean, found {other}"
            ))),
        }
    }

    fn int(&mut self, v: Value) -> Result<Option<i64>, EvalError> {
        match v {
            Value::Int(i) => Ok(Some(i)),
            Value::Undef => Ok(None),
            other => Err(EvalError::Type(format!(
                "expected an integer, found {other}"
            ))),
        }
    }

    fn object<'e>(
        &self,
        r: &ObjRef,
        env: &'e Environment,
    ) -> Result<(usize, Option<&'e ObjectState>), EvalError> {
        let id = *env
            .bindings
            .get(r.binding())
            .ok_or_else(|| EvalError::Type(format!("unbound object `{r}`")))?;
        Ok((id, env.states.get(id).and_then(Option::as_ref)))
    }

    fn ev(
        &mut self,
        e: &Expr,
        fr: &Frame<'_>,
        locals: &mut Vec<(String, Value)>,
    ) -> Result<Value, EvalError> {
        Ok(match e {
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Int(i) => Value::Int(*i),
            Expr::Elem(j) => Value::Elem(
                u8::try_from(*j)
                    .map_err(|_| EvalError::Type("element literal out of range".into()))?,
            ),
            Expr::Var(v) => match locals.iter().rev().find(|(n, _)| n == v) {
                Some((_, val)) => val.clone(),
                None => fr
                    .env
                    .params
                    .get(v)
                    .cloned()
                    .ok_or_else(|| EvalError::Type(format!("unbound variable `{v}`")))?,
            },
            Expr::Result => fr
                .result
                .cloned()
                .ok_or_else(|| EvalError::Type("`Result` outside a query postcondition".into()))?,
            Expr::Object(r) => Value::Obj(self.object(r, fr.env)?.0),
            Expr::Read { target, name } => self.read(target, name, fr.env)?,
            Expr::Old(inner) => match fr.old {
                Some(old) => {
                    let old_frame = Frame {
                        env: old,
                        old: None,
                        result: fr.result,
                    };
                    self.ev(inner, &old_frame, locals)?
                }
                None => {
                    self.notes.undefined = true;
                    Value::Undef
                }
            },
            Expr::Not(inner) => {
                let v = self.ev(inner, fr, locals)?;
                Value::Bool(!self.truth(v)?)
            }
            Expr::Binary(op, a, b) => self.binary(*op, a, b, fr, locals)?,
            Expr::Seq(op, s, arg) => {
                let seq = match self.ev(s, fr, locals)? {
                    Value::Seq(s) => Some(s),
                    Value::Undef => None,
                    other => {
                        return Err(EvalError::Type(format!(
                            "expected a sequence, found {other}"
                        )))
                    }
                };
                let arg = match arg {
                    Some(a) => Some(self.ev(a, fr, locals)?),
                    None => None,
                };
                self.seq_op(*op, seq, arg)?
            }
            Expr::Index(s, i) => {
                let seq = self.ev(s, fr, locals)?;
                let idx = self.ev(i, fr, locals)?;
                let idx = self.int(idx)?;
                match (seq, idx) {
                    (Value::Seq(s), Some(i)) if i >= 1 && (i as usize) <= s.len() => {
                        Value::Elem(s[i as usize - 1])
                    }
                    (Value::Seq(_) | Value::Undef, _) => Value::Undef,
                    (other, _) => return Err(EvalError::Type(format!("cannot index {other}"))),
                }
            }
            Expr::Across { var, lo, hi, body } => {
                let lo = self.ev(lo, fr, locals)?;
                let hi = self.ev(hi, fr, locals)?;
                match (self.int(lo)?, self.int(hi)?) {
                    (Some(lo), Some(hi)) => {
                        if hi.saturating_sub(lo) > 1_000_000 {
                            return Err(EvalError::Type("across range too large".into()));
                        }
                        let mut all = true;
                        for i in lo..=hi {
                            locals.push((var.clone(), Value::Int(i)));
                            let v = self.ev(body, fr, locals);
                            locals.pop();
                            if !self.truth(v?)? {
                                all = false;
                                break;
                            }
                        }
                        Value::Bool(all)
                    }
                    _ => {
                        self.notes.undefined = true;
                        Value::Bool(false)
                    }
                }
            }
            Expr::IsEqual(a, b) => {
                let (_, sa) = self.object(a, fr.env)?;
                let (_, sb) = self.object(b, fr.env)?;
                match (sa, sb) {
                    (Some(sa), Some(sb)) => Value::Bool(equality_holds(self.class, sa, sb)?),
                    _ => {
                        self.notes.undefined = true;
                        Value::Bool(false)
                    }
                }
            }
        })
    }

    fn read(&mut self, target: &ObjRef, name: &str, env: &Environment) -> Result<Value, EvalError> {
        let (id, state) = self.object(target, env)?;
        let Some(state) = state else {
            self.notes.undefined = true;
            return Ok(Value::Undef);
        };
        if let Some(m) = self.class.model_index(name) {
            return Ok(Value::Seq(state.model[m].clone()));
        }
        let qi = self
            .class
            .query_index(name)
            .ok_or_else(|| EvalError::Type(format!("unknown component `{name}`")))?;
        let query = self.class.queries().nth(qi).expect("query index in range");
        if !self.raw && !query.precondition.is_empty() {
            let scope = env.call_scope(id, BTreeMap::new());
            let mut inner = Evaluator::raw(self.class);
            let mut ok = true;
            for clause in &query.precondition {
                if !inner.holds(&clause.expr, &scope, None, None)? {
                    ok = false;
                    break;
                }
            }
            if !ok {
                self.notes.masked_reads.push(MaskedRead {
                    object: target.binding().to_string(),
                    query: name.to_string(),
                });
                self.notes.undefined = true;
                return Ok(Value::Undef);
            }
        }
        let raw = *state
            .slots
            .get(qi)
            .ok_or_else(|| EvalError::Type(format!("state has no slot for `{name}`")))?;
        Ok(Value::from_slot(query.result_sort().expect("query"), raw))
    }

    fn seq_op(
        &mut self,
        op: SeqOp,
        seq: Option<Vec<u8>>,
        arg: Option<Value>,
    ) -> Result<Value, EvalError> {
        let Some(mut s) = seq else {
            self.notes.undefined = true;
            return Ok(match op {
                SeqOp::IsEmpty => Value::Bool(false),
                _ => Value::Undef,
            });
        };
        Ok(match op {
            SeqOp::Extended => match arg {
                Some(Value::Elem(e)) => {
                    s.push(e);
                    Value::Seq(s)
                }
                Some(Value::Undef) => Value::Undef,
                other => {
                    return Err(EvalError::Type(format!(
                        "cannot extend a sequence with {other:?}"
                    )))
                }
            },
            SeqOp::ButLast => {
                if s.pop().is_some() {
                    Value::Seq(s)
                } else {
                    Value::Undef
                }
            }
            SeqOp::Last => s.last().map_or(Value::Undef, |e| Value::Elem(*e)),
            SeqOp::IsEmpty => Value::Bool(s.is_empty()),
            SeqOp::Count => Value::Int(s.len() as i64),
        })
    }

    fn binary(
        &mut self,
        op: BinOp,
        a: &Expr,
        b: &Expr,
        fr: &Frame<'_>,
        locals: &mut Vec<(String, Value)>,
    ) -> Result<Value, EvalError> {
        match op {
            BinOp::And => {
                let va = self.ev(a, fr, locals)?;
                if !self.truth(va)? {
                    return Ok(Value::Bool(false));
                }
                let vb = self.ev(b, fr, locals)?;
                Ok(Value::Bool(self.truth(vb)?))
            }
            BinOp::Or => {
                let va = self.ev(a, fr, locals)?;
                if self.truth(va)? {
                    return Ok(Value::Bool(true));
                }
                let vb = self.ev(b, fr, locals)?;
                Ok(Value::Bool(self.truth(vb)?))
            }
            BinOp::Implies => {
                let va = self.ev(a, fr, locals)?;
                if !self.truth(va)? {
                    return Ok(Value::Bool(true));
                }
                let vb = self.ev(b, fr, locals)?;
                Ok(Value::Bool(self.truth(vb)?))
            }
            _ => {
                let va = self.ev(a, fr, locals)?;
                let vb = self.ev(b, fr, locals)?;
                if va == Value::Undef || vb == Value::Undef {
                    self.notes.undefined = true;
                    return Ok(match op {
                        BinOp::Add | BinOp::Sub => Value::Undef,
                        _ => Value::Bool(false),
                    });
                }
                match op {
                    BinOp::Eq => Ok(Value::Bool(va == vb)),
                    BinOp::Ne => Ok(Value::Bool(va != vb)),
                    _ => {
                        let (Value::Int(x), Value::Int(y)) = (&va, &vb) else {
                            return Err(EvalError::Type(format!(
                                "`{}` needs integers, found {va} and {vb}",
                                op.symbol()
                            )));
                        };
                        Ok(match op {
                            BinOp::Lt => Value::Bool(x < y),
                            BinOp::Le => Value::Bool(x <= y),
                            BinOp::Gt => Value::Bool(x > y),
                            BinOp::Ge => Value::Bool(x >= y),
                            BinOp::Add => Value::Int(x + y),
                            BinOp::Sub => Value::Int(x - y),
                            _ => unreachable!(),
                        })
                    }
                }
            }
        }
    }
}

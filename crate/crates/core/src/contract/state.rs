use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::eval::{Environment, EvalError, Evaluator, Value};
use super::ContractClass;

/// Small-scope parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bounds {
    /// Size of the element domain (k).
    #[serde(rename = "k")]
    pub elements: usize,
    /// Maximum model sequence length (L).
    #[serde(rename = "len")]
    pub max_len: usize,
}

impl Bounds {
    pub const MAX_ELEMENTS: usize = 16;

    pub fn new(elements: usize, max_len: usize) -> Self {
        Bounds { elements, max_len }
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds::new(2, 3)
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={}, len={}", self.elements, self.max_len)
    }
}

/// Finite abstract state of one object: model sequences, then one slot per
/// query (an element index, or 0/1 for booleans). Slots of queries whose
/// precondition fails in the state hold the canonical value 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectState {
    pub model: Vec<Vec<u8>>,
    pub slots: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlotView {
    Masked,
    Value(Value),
}

impl ObjectState {
    /// Component values in display order: model fields, then queries.
    pub fn view(&self, class: &ContractClass) -> Result<Vec<(String, SlotView)>, EvalError> {
        if self.model.len() != class.model_fields.len()
            || self.slots.len() != class.queries().count()
        {
            return Err(EvalError::Type(format!(
                "state does not have the shape of {}",
                class.name
            )));
        }
        let mut out = Vec::new();
        for (m, field) in class.model_fields.iter().enumerate() {
            out.push((
                field.name.clone(),
                SlotView::Value(Value::Seq(self.model[m].clone())),
            ));
        }
        for (qi, q) in class.queries().enumerate() {
            let view = if slot_is_masked(class, self, qi)? {
                SlotView::Masked
            } else {
                SlotView::Value(Value::from_slot(
                    q.result_sort().expect("query"),
                    self.slots[qi],
                ))
            };
            out.push((q.name.clone(), view));
        }
        Ok(out)
    }

    pub fn describe(&self, class: &ContractClass) -> String {
        match self.view(class) {
            Ok(view) => {
                let parts: Vec<String> = view
                    .into_iter()
                    .map(|(name, v)| match v {
                        SlotView::Masked => format!("{name} = -"),
                        SlotView::Value(v) => format!("{name} = {v}"),
                    })
                    .collect();
                format!("{{{}}}", parts.join(", "))
            }
            Err(e) => format!("{{{e}}}"),
        }
    }

    fn has_shape_of(&self, class: &ContractClass, bounds: Bounds) -> bool {
        self.model.len() == class.model_fields.len()
            && self.slots.len() == class.queries().count()
            && self.model.iter().all(|s| {
                s.len() <= bounds.max_len && s.iter().all(|e| (*e as usize) < bounds.elements)
            })
            && class.queries().zip(&self.slots).all(|(q, v)| {
                (*v as usize) < q.result_sort().expect("query").domain_size(bounds.elements)
            })
    }
}

/// Whether query `qi` is outside its precondition in `state`.
pub fn slot_is_masked(
    class: &ContractClass,
    state: &ObjectState,
    qi: usize,
) -> Result<bool, EvalError> {
    let query = class.queries().nth(qi).expect("query index in range");
    if query.precondition.is_empty() {
        return Ok(false);
    }
    let env = Environment::current(state.clone());
    let mut ev = Evaluator::raw(class);
    for clause in &query.precondition {
        if !ev.holds(&clause.expr, &env, None, None)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Canonical, and every query whose precondition holds satisfies its
/// postcondition with `Result` bound to its slot.
fn admissible(class: &ContractClass, state: &ObjectState) -> Result<bool, EvalError> {
    let env = Environment::current(state.clone());
    for (qi, q) in class.queries().enumerate() {
        if slot_is_masked(class, state, qi)? {
            if state.slots[qi] != 0 {
                return Ok(false);
            }
            continue;
        }
        let result = Value::from_slot(q.result_sort().expect("query"), state.slots[qi]);
        let mut ev = Evaluator::new(class);
        for clause in &q.postcondition {
            if !ev.holds(&clause.expr, &env, Some(&env), Some(&result))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `is_equal` on two abstract states: the class's equality definition with
/// `Current = a` and `other = b`, or plain state equality without one.
pub fn equality_holds(
    class: &ContractClass,
    a: &ObjectState,
    b: &ObjectState,
) -> Result<bool, EvalError> {
    match &class.equality {
        None => Ok(a == b),
        Some(def) => {
            let mut env = Environment::current(a.clone());
            env.bind_new("other", Some(b.clone()));
            Evaluator::new(class).holds(def, &env, None, None)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateSpaceError {
    #[error("invalid bounds ({0}): need 1 <= k <= {max}", max = Bounds::MAX_ELEMENTS)]
    InvalidBounds(Bounds),
    #[error("no admissible state at {0}: the query definitions are inconsistent or the bounds are too small")]
    Empty(Bounds),
    #[error("state space at {bounds} has {raw} raw valuations, over the limit of {limit}")]
    TooLarge {
        bounds: Bounds,
        raw: u128,
        limit: u128,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The admissible abstract states of a class at given bounds, sorted.
#[derive(Debug, Clone)]
pub struct StateSpace {
    bounds: Bounds,
    states: Vec<ObjectState>,
    index: HashMap<ObjectState, usize>,
}

impl StateSpace {
    pub const RAW_LIMIT: u128 = 20_000_000;

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn states(&self) -> &[ObjectState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn position(&self, state: &ObjectState) -> Option<usize> {
        self.index.get(state).copied()
    }

    pub fn contains(&self, state: &ObjectState) -> bool {
        self.index.contains_key(state)
    }
}

/// All sequences over `k` elements of length at most `max_len`.
fn sequences(k: usize, max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for e in 0..k {
                let mut t: Vec<u8> = s.clone();
                t.push(e as u8);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Enumerates every valuation of model fields and query slots within
/// `bounds`, keeping the canonical ones that satisfy the query definitions.
pub fn state_space(class: &ContractClass, bounds: Bounds) -> Result<StateSpace, StateSpaceError> {
    if bounds.elements == 0 || bounds.elements > Bounds::MAX_ELEMENTS {
        return Err(StateSpaceError::InvalidBounds(bounds));
    }
    let seqs = sequences(bounds.elements, bounds.max_len);
    let slot_sizes: Vec<usize> = class
        .queries()
        .map(|q| q.result_sort().expect("query").domain_size(bounds.elements))
        .collect();
    let raw = (seqs.len() as u128).saturating_pow(class.model_fields.len() as u32)
        * slot_sizes.iter().map(|s| *s as u128).product::<u128>();
    if raw > StateSpace::RAW_LIMIT {
        return Err(StateSpaceError::TooLarge {
            bounds,
            raw,
            limit: StateSpace::RAW_LIMIT,
        });
    }

    let mut states = Vec::new();
    let mut model_digits = vec![0usize; class.model_fields.len()];
    loop {
        let model: Vec<Vec<u8>> = model_digits.iter().map(|d| seqs[*d].clone()).collect();
        let mut slot_digits = vec![0usize; slot_sizes.len()];
        loop {
            let candidate = ObjectState {
                model: model.clone(),
                slots: slot_digits.iter().map(|d| *d as u8).collect(),
            };
            if admissible(class, &candidate)? {
                states.push(candidate);
            }
            if !odometer(&mut slot_digits, |_| 0, |i| slot_sizes[i]) {
                break;
            }
        }
        if !odometer(&mut model_digits, |_| 0, |_| seqs.len()) {
            break;
        }
    }
    if states.is_empty() {
        return Err(StateSpaceError::Empty(bounds));
    }
    states.sort();
    let index = states
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    Ok(StateSpace {
        bounds,
        states,
        index,
    })
}

/// Advances a mixed-radix counter; false once it wraps around.
fn odometer(
    digits: &mut [usize],
    reset: impl Fn(usize) -> usize,
    radix: impl Fn(usize) -> usize,
) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radix(i) {
            return true;
        }
        digits[i] = reset(i);
    }
    false
}

/// Whether `state` is admissible at `bounds`, without enumerating.
pub fn is_admissible(
    class: &ContractClass,
    state: &ObjectState,
    bounds: Bounds,
) -> Result<bool, EvalError> {
    Ok(state.has_shape_of(class, bounds) && admissible(class, state)?)
}

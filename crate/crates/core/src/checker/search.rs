use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use super::trace::{Failure, FailureKind, Step};
use super::{CheckError, Statistics};
use crate::contract::{
    state_space, Bounds, Clause, ContractClass, Environment, Evaluator, ObjectState, StateSpace,
    StateSpaceError, Value, ValueSort,
};
use crate::drivers::{Call, SpecDriver};

/// The state space at `(k, 2L + 1)`, built on first use. A call whose
/// postcondition has no solution within the bounds but one here is cut off
/// rather than reported infeasible.
pub struct ExtendedSpace<'a> {
    class: &'a ContractClass,
    bounds: Bounds,
    cell: OnceLock<Result<StateSpace, StateSpaceError>>,
}

impl<'a> ExtendedSpace<'a> {
    pub fn new(class: &'a ContractClass, bounds: Bounds) -> Self {
        ExtendedSpace {
            class,
            bounds: Bounds::new(bounds.elements, 2 * bounds.max_len + 1),
            cell: OnceLock::new(),
        }
    }

    pub fn get(&self) -> Result<&StateSpace, CheckError> {
        self.cell
            .get_or_init(|| state_space(self.class, self.bounds))
            .as_ref()
            .map_err(|e| CheckError::from_space(e.clone()))
    }
}

/// Witness slots, by status priority.
pub const INFEASIBLE: usize = 0;
pub const UNPROVABLE: usize = 1;
pub const INVALID: usize = 2;

#[derive(Debug, Clone)]
pub struct Witness {
    pub env_index: u64,
    pub initial: Environment,
    pub steps: Vec<Step>,
    pub failure: Failure,
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub stats: Statistics,
    pub witnesses: [Option<Witness>; 3],
}

impl Outcome {
    pub fn merge(mut self, other: Outcome) -> Outcome {
        self.stats.environments += other.stats.environments;
        self.stats.branches += other.stats.branches;
        self.stats.executions += other.stats.executions;
        self.stats.pruned += other.stats.pruned;
        for (mine, theirs) in self.witnesses.iter_mut().zip(other.witnesses) {
            let Some(t) = theirs else { continue };
            match mine {
                Some(m) if m.env_index <= t.env_index => {}
                _ => *mine = Some(t),
            }
        }
        self
    }

    fn record(&mut self, slot: usize, witness: impl FnOnce() -> Witness) {
        if self.witnesses[slot].is_none() {
            self.witnesses[slot] = Some(witness());
        }
    }
}

/// Restricted-growth strings of length `n`: every way of letting `n`
/// objects share identities, in lexicographic order.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, n: usize, next: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=next {
            prefix.push(b);
            go(prefix, n, next.max(b + 1), out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, 0, &mut out);
    out
}

/// Exhaustive demonic exploration of one driver.
pub struct Search<'a> {
    pub class: &'a ContractClass,
    pub driver: &'a SpecDriver,
    pub space: &'a StateSpace,
    pub extended: &'a ExtendedSpace<'a>,
    partitions: Vec<Vec<usize>>,
    /// Index of the first environment of each partition.
    offsets: Vec<u64>,
    param_radix: Vec<usize>,
    param_count: u64,
    pub total: u64,
    cap: u64,
    branches: &'a AtomicU64,
}

impl<'a> Search<'a> {
    pub fn new(
        class: &'a ContractClass,
        driver: &'a SpecDriver,
        space: &'a StateSpace,
        extended: &'a ExtendedSpace<'a>,
        cap: u64,
        branches: &'a AtomicU64,
    ) -> Result<Self, CheckError> {
        let position = |name: &str| driver.objects.iter().position(|o| o == name);
        let distinct: Vec<(usize, usize)> = driver
            .distinct_pairs()
            .iter()
            .filter_map(|(a, b)| Some((position(a)?, position(b)?)))
            .collect();
        let partitions: Vec<Vec<usize>> = partitions(driver.objects.len())
            .into_iter()
            .filter(|p| distinct.iter().all(|(a, b)| p[*a] != p[*b]))
            .collect();
        let k = space.bounds().elements;
        let param_radix: Vec<usize> = driver
            .params
            .iter()
            .map(|p| p.sort.domain_size(k))
            .collect();
        let too_large = || {
            CheckError::ResourceLimit(format!(
                "driver {} has too many initial environments",
                driver.name
            ))
        };
        let param_count = param_radix
            .iter()
            .try_fold(1u64, |acc, r| acc.checked_mul(*r as u64))
            .ok_or_else(too_large)?;
        let mut offsets = Vec::with_capacity(partitions.len());
        let mut total = 0u64;
        for p in &partitions {
            offsets.push(total);
            let blocks = p.iter().max().map_or(0, |m| m + 1);
            let states = (space.len() as u64)
                .checked_pow(blocks as u32)
                .ok_or_else(too_large)?;
            let n = states.checked_mul(param_count).ok_or_else(too_large)?;
            total = total.checked_add(n).ok_or_else(too_large)?;
        }
        Ok(Search {
            class,
            driver,
            space,
            extended,
            partitions,
            offsets,
            param_radix,
            param_count,
            total,
            cap,
            branches,
        })
    }

    /// The initial environment with flat index `index`: partition, then
    /// identity states, then parameter values, most significant first.
    pub fn environment(&self, index: u64) -> Environment {
        let p = self.offsets.partition_point(|o| *o <= index) - 1;
        let partition = &self.partitions[p];
        let blocks = partition.iter().max().map_or(0, |m| m + 1);
        let mut rest = index - self.offsets[p];
        let mut param_digit = rest % self.param_count;
        rest /= self.param_count;
        let n = self.space.len() as u64;
        let mut digits = vec![0usize; blocks];
        for d in digits.iter_mut().rev() {
            *d = (rest % n) as usize;
            rest /= n;
        }
        let mut env = Environment {
            states: digits
                .iter()
                .map(|d| Some(self.space.states()[*d].clone()))
                .collect(),
            ..Environment::default()
        };
        for (name, block) in self.driver.objects.iter().zip(partition) {
            env.bindings.insert(name.clone(), *block);
        }
        for local in &self.driver.locals {
            env.bind_new(local, None);
        }
        let mut values = vec![0usize; self.param_radix.len()];
        for (v, r) in values.iter_mut().zip(&self.param_radix).rev() {
            *v = (param_digit % *r as u64) as usize;
            param_digit /= *r as u64;
        }
        for (param, v) in self.driver.params.iter().zip(values) {
            let value = match param.sort {
                ValueSort::Element => Value::Elem(v as u8),
                ValueSort::Boolean => Value::Bool(v == 1),
            };
            env.params.insert(param.name.clone(), value);
        }
        env
    }

    pub fn run(&self, index: u64) -> Result<Outcome, CheckError> {
        let env = self.environment(index);
        let mut out = Outcome::default();
        let initial: Vec<ObjectState> = env.states.iter().flatten().cloned().collect();
        if self.class.has_model() && !consistent_all(&initial) {
            return Ok(out);
        }
        let mut ev = Evaluator::new(self.class);
        for clause in &self.driver.precondition {
            if !ev.holds(clause, &env, None, None)? {
                return Ok(out);
            }
        }
        out.stats.environments = 1;
        let mut ctx = Dfs {
            index,
            initial: &env,
            history: initial,
            trail: Vec::new(),
            out,
        };
        self.explore(&mut ctx, env.clone(), 0)?;
        Ok(ctx.out)
    }

    fn explore(
        &self,
        ctx: &mut Dfs<'_>,
        mut env: Environment,
        step: usize,
    ) -> Result<(), CheckError> {
        let Some(call) = self.driver.body.get(step) else {
            ctx.out.stats.executions += 1;
            if let Some(failure) = evaluate_post(self.class, self.driver, &env)? {
                let slot = if failure.kind == FailureKind::MaskedRead {
                    UNPROVABLE
                } else {
                    INVALID
                };
                ctx.witness(slot, failure);
            }
            return Ok(());
        };
        let feature = self.class.feature(&call.feature).ok_or_else(|| {
            CheckError::DriverMismatch(format!("unknown feature `{}`", call.feature))
        })?;
        let id = *env.bindings.get(&call.target).ok_or_else(|| {
            CheckError::DriverMismatch(format!("unbound object `{}`", call.target))
        })?;
        let pre_scope = env.call_scope(id, call_args(self.class, call, &env)?);
        if let Some(clause) = failing_clause(self.class, &feature.precondition, &pre_scope)? {
            ctx.witness(
                UNPROVABLE,
                Failure {
                    kind: FailureKind::Precondition,
                    index: step,
                    clause: clause.to_string(),
                },
            );
            return Ok(());
        }
        let solutions = post_states(
            self.class,
            &feature.postcondition,
            &pre_scope,
            id,
            self.space.states(),
        )?;
        if solutions.is_empty() {
            if self.class.has_model()
                && !post_states(
                    self.class,
                    &feature.postcondition,
                    &pre_scope,
                    id,
                    self.extended.get()?.states(),
                )?
                .is_empty()
            {
                ctx.out.stats.pruned += 1;
            } else {
                ctx.witness(
                    INFEASIBLE,
                    Failure {
                        kind: FailureKind::Infeasible,
                        index: step,
                        clause: clause_list(&feature.postcondition),
                    },
                );
            }
            return Ok(());
        }
        for s in solutions {
            if self.class.has_model() && !consistent_with(&ctx.history, &s) {
                ctx.out.stats.pruned += 1;
                continue;
            }
            let taken = self.branches.fetch_add(1, Ordering::Relaxed) + 1;
            if taken > self.cap {
                return Err(CheckError::ResourceLimit(format!(
                    "driver {} explores more than {} branches",
                    self.driver.name, self.cap
                )));
            }
            ctx.out.stats.branches += 1;
            let before = env.states[id].replace(s.clone());
            ctx.history.push(s.clone());
            ctx.trail.push(Step {
                call: step,
                identity: id,
                post_state: s,
            });
            self.explore(ctx, env.clone(), step + 1)?;
            ctx.trail.pop();
            ctx.history.pop();
            env.states[id] = before;
        }
        Ok(())
    }
}

struct Dfs<'e> {
    index: u64,
    initial: &'e Environment,
    /// Every state seen on the current branch.
    history: Vec<ObjectState>,
    trail: Vec<Step>,
    out: Outcome,
}

impl Dfs<'_> {
    fn witness(&mut self, slot: usize, failure: Failure) {
        let (index, initial, trail) = (self.index, self.initial, &self.trail);
        self.out.record(slot, || Witness {
            env_index: index,
            initial: initial.clone(),
            steps: trail.clone(),
            failure,
        });
    }
}

/// Two states that agree on the model must be the same state.
pub fn consistent_with(history: &[ObjectState], s: &ObjectState) -> bool {
    history.iter().all(|h| h.model != s.model || h == s)
}

pub fn consistent_all(states: &[ObjectState]) -> bool {
    states
        .iter()
        .enumerate()
        .all(|(i, s)| consistent_with(&states[..i], s))
}

pub fn call_args(
    class: &ContractClass,
    call: &Call,
    env: &Environment,
) -> Result<BTreeMap<String, Value>, CheckError> {
    let feature = class
        .feature(&call.feature)
        .ok_or_else(|| CheckError::DriverMismatch(format!("unknown feature `{}`", call.feature)))?;
    let mut args = BTreeMap::new();
    for (p, a) in feature.params.iter().zip(&call.args) {
        args.insert(
            p.name.clone(),
            Evaluator::new(class).eval(a, env, None, None)?,
        );
    }
    Ok(args)
}

/// First clause of a conjunction that does not hold.
pub fn failing_clause<'c>(
    class: &ContractClass,
    clauses: &'c [Clause],
    scope: &Environment,
) -> Result<Option<&'c Clause>, CheckError> {
    let mut ev = Evaluator::new(class);
    for c in clauses {
        if !ev.holds(&c.expr, scope, None, None)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Candidates for the state of `id` after a call, in order, that satisfy
/// the postcondition against the pre-call scope.
pub fn post_states(
    class: &ContractClass,
    post: &[Clause],
    pre_scope: &Environment,
    id: usize,
    candidates: &[ObjectState],
) -> Result<Vec<ObjectState>, CheckError> {
    let mut out = Vec::new();
    let mut scope = pre_scope.clone();
    for s in candidates {
        scope.states[id] = Some(s.clone());
        if satisfies(class, post, &scope, pre_scope)? {
            out.push(s.clone());
        }
    }
    Ok(out)
}

pub fn satisfies(
    class: &ContractClass,
    post: &[Clause],
    scope: &Environment,
    pre_scope: &Environment,
) -> Result<bool, CheckError> {
    let mut ev = Evaluator::new(class);
    for c in post {
        if !ev.holds(&c.expr, scope, Some(pre_scope), None)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn clause_list(clauses: &[Clause]) -> String {
    clauses
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Evaluates the driver postcondition strictly: a clause that reads a
/// query outside its precondition fails as unprovable even when the
/// undefined read happens to make it true.
pub fn evaluate_post(
    class: &ContractClass,
    driver: &SpecDriver,
    env: &Environment,
) -> Result<Option<Failure>, CheckError> {
    for (i, clause) in driver.postcondition.iter().enumerate() {
        let mut ev = Evaluator::new(class);
        let holds = ev.holds(clause, env, None, None)?;
        let kind = if !ev.notes.masked_reads.is_empty() {
            FailureKind::MaskedRead
        } else if !holds {
            FailureKind::Postcondition
        } else {
            continue;
        };
        return Ok(Some(Failure {
            kind,
            index: i,
            clause: clause.to_string(),
        }));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_are_bell_numbers() {
        let sizes: Vec<usize> = (0..6).map(|n| partitions(n).len()).collect();
        assert_eq!(sizes, vec![1, 1, 2, 5, 15, 52]);
        assert_eq!(partitions(2), vec![vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn consistency_compares_models_only() {
        let a = ObjectState {
            model: vec![vec![0]],
            slots: vec![1],
        };
        let b = ObjectState {
            model: vec![vec![0]],
            slots: vec![0],
        };
        let c = ObjectState {
            model: vec![vec![1]],
            slots: vec![0],
        };
        assert!(consistent_all(&[a.clone(), c.clone(), a.clone()]));
        assert!(!consistent_all(&[a, c, b]));
    }
}

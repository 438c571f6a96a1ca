use thiserror::Error;

use super::search::{
    call_args, consistent_all, consistent_with, failing_clause, post_states, satisfies,
    ExtendedSpace,
};
use super::trace::{Counterexample, FailureKind};
use super::CheckError;
use crate::contract::{
    is_admissible, state_space, ContractClass, Environment, Evaluator, Value, ValueSort,
};
use crate::drivers::SpecDriver;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    /// The trace does not fit the driver or the class.
    #[error("stale-trace: {0}")]
    Stale(String),
    #[error(transparent)]
    Check(#[from] CheckError),
}

fn stale<T>(msg: impl Into<String>) -> Result<T, ReplayError> {
    Err(ReplayError::Stale(msg.into()))
}

/// Re-executes the recorded trace, without search, at the trace's bounds.
/// `Ok(true)` when it is still a legal execution of `driver` under `class`
/// that ends in the recorded failure.
pub fn replay_counterexample(
    cex: &Counterexample,
    driver: &SpecDriver,
    class: &ContractClass,
) -> Result<bool, ReplayError> {
    let bounds = cex.bounds;
    if cex.driver != driver.name {
        return stale(format!(
            "trace is for driver {}, not {}",
            cex.driver, driver.name
        ));
    }
    let mut env = Environment::default();
    for state in &cex.initial {
        env.states.push(Some(state.clone()));
    }
    if cex.objects.len() != driver.objects.len() {
        return stale("trace objects do not match the driver arguments");
    }
    for name in &driver.objects {
        match cex.objects.iter().find(|(n, _)| n == name) {
            Some((_, id)) if *id < cex.initial.len() => {
                env.bindings.insert(name.clone(), *id);
            }
            _ => return stale(format!("trace has no identity for `{name}`")),
        }
    }
    for local in &driver.locals {
        env.bind_new(local, None);
    }
    if cex.params.len() != driver.params.len() {
        return stale("trace parameters do not match the driver");
    }
    for p in &driver.params {
        let value = cex
            .params
            .iter()
            .find(|(n, _)| *n == p.name)
            .map(|(_, v)| v);
        let fits = match (p.sort, value) {
            (ValueSort::Element, Some(Value::Elem(e))) => (*e as usize) < bounds.elements,
            (ValueSort::Boolean, Some(Value::Bool(_))) => true,
            _ => false,
        };
        if !fits {
            return stale(format!("bad value for parameter `{}`", p.name));
        }
        env.params
            .insert(p.name.clone(), value.cloned().expect("checked"));
    }
    for s in cex
        .initial
        .iter()
        .chain(cex.steps.iter().map(|s| &s.post_state))
    {
        if !is_admissible(class, s, bounds).map_err(CheckError::from)? {
            return stale(format!(
                "state {} is not an abstract state of {}",
                s.describe(class),
                class.name
            ));
        }
    }

    let failure = &cex.failure;
    let executed = match failure.kind {
        FailureKind::Precondition | FailureKind::Infeasible => failure.index,
        FailureKind::Postcondition | FailureKind::MaskedRead => driver.body.len(),
    };
    if executed > driver.body.len() || cex.steps.len() != executed {
        return stale("trace steps do not follow the driver body");
    }

    let mut history: Vec<_> = cex.initial.clone();
    if class.has_model() && !consistent_all(&history) {
        return Ok(false);
    }
    let mut ev = Evaluator::new(class);
    for clause in &driver.precondition {
        if !ev
            .holds(clause, &env, None, None)
            .map_err(CheckError::from)?
        {
            return Ok(false);
        }
    }
    for (j, step) in cex.steps.iter().enumerate() {
        let call = &driver.body[j];
        let id = env.bindings[&call.target];
        if step.call != j || step.identity != id {
            return stale(format!("step {} does not match call {}", j + 1, call));
        }
        let feature = class.feature(&call.feature).ok_or_else(|| {
            ReplayError::Stale(format!("class has no feature `{}`", call.feature))
        })?;
        let pre_scope = env.call_scope(id, call_args(class, call, &env)?);
        if failing_clause(class, &feature.precondition, &pre_scope)?.is_some() {
            return Ok(false);
        }
        let mut post_scope = pre_scope.clone();
        post_scope.states[id] = Some(step.post_state.clone());
        if !satisfies(class, &feature.postcondition, &post_scope, &pre_scope)? {
            return Ok(false);
        }
        if class.has_model() && !consistent_with(&history, &step.post_state) {
            return Ok(false);
        }
        history.push(step.post_state.clone());
        env.states[id] = Some(step.post_state.clone());
    }

    match failure.kind {
        FailureKind::Precondition | FailureKind::Infeasible => {
            let call = &driver.body[executed];
            let id = env.bindings[&call.target];
            let feature = class.feature(&call.feature).ok_or_else(|| {
                ReplayError::Stale(format!("class has no feature `{}`", call.feature))
            })?;
            let pre_scope = env.call_scope(id, call_args(class, call, &env)?);
            let pre_fails = failing_clause(class, &feature.precondition, &pre_scope)?.is_some();
            if failure.kind == FailureKind::Precondition {
                return Ok(pre_fails);
            }
            if pre_fails {
                return Ok(false);
            }
            let space = state_space(class, bounds).map_err(CheckError::from_space)?;
            if !post_states(
                class,
                &feature.postcondition,
                &pre_scope,
                id,
                space.states(),
            )?
            .is_empty()
            {
                return Ok(false);
            }
            if class.has_model() {
                let extended = ExtendedSpace::new(class, bounds);
                if !post_states(
                    class,
                    &feature.postcondition,
                    &pre_scope,
                    id,
                    extended.get()?.states(),
                )?
                .is_empty()
                {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        FailureKind::Postcondition | FailureKind::MaskedRead => {
            let Some(clause) = driver.postcondition.get(failure.index) else {
                return stale(format!(
                    "driver has no postcondition clause {}",
                    failure.index + 1
                ));
            };
            let mut ev = Evaluator::new(class);
            let holds = ev
                .holds(clause, &env, None, None)
                .map_err(CheckError::from)?;
            let masked = !ev.notes.masked_reads.is_empty();
            Ok(match failure.kind {
                FailureKind::MaskedRead => masked,
                _ => !masked && !holds,
            })
        }
    }
}

//! Property checks shared by the proptest suite and the acceptance gate.

use ccheck::checker::{
    check_completeness, check_generated, replay_counterexample, CheckOptions, CompletenessReport,
    Counterexample, VerdictStatus,
};
use ccheck::contract::{equality_holds, state_space, Bounds, Clause, ContractClass, Expr};
use ccheck::drivers::{generate_drivers, GeneratedDrivers, SpecDriver};
use ccheck::dsl::{
    parse_adt, parse_contract, parse_drivers, print_adt, print_contract, print_drivers,
};

use super::{adt, contract, read, CONTRACTS, SPECS};

pub fn options(k: usize, len: usize) -> CheckOptions {
    CheckOptions {
        bounds: Bounds::new(k, len),
        ..CheckOptions::default()
    }
}

fn all(drivers: &GeneratedDrivers) -> impl Iterator<Item = &SpecDriver> {
    drivers
        .axiom
        .iter()
        .chain(&drivers.equivalence)
        .chain(&drivers.well_definedness)
}

/// Every counterexample of one (spec, contract) pair at `(k, len)`.
pub fn counterexamples(
    spec: &str,
    name: &str,
    k: usize,
    len: usize,
) -> Vec<(SpecDriver, Counterexample)> {
    let adt = adt(spec);
    let class = contract(name);
    let drivers = generate_drivers(&adt, &class).unwrap();
    let report = check_generated(&adt.name, &drivers, &class, options(k, len)).unwrap();
    all(&drivers)
        .filter_map(|d| {
            let v = report.verdict(&d.name).unwrap();
            v.counterexample.clone().map(|c| (d.clone(), c))
        })
        .collect()
}

/// (a) Every non-valid verdict carries a counterexample that replays.
pub fn replays(spec: &str, name: &str, k: usize, len: usize) -> Result<usize, String> {
    let class = contract(name);
    let adt = adt(spec);
    let report = check_completeness(&adt, &class, options(k, len)).unwrap();
    for v in report.verdicts() {
        if v.status != VerdictStatus::Valid && v.counterexample.is_none() {
            return Err(format!("{name} {}: {} without a trace", v.driver, v.status));
        }
    }
    let cexs = counterexamples(spec, name, k, len);
    for (d, c) in &cexs {
        if replay_counterexample(c, d, &class) != Ok(true) {
            return Err(format!(
                "{spec} {name} {} at k={k} len={len} does not replay",
                d.name
            ));
        }
    }
    Ok(cexs.len())
}

/// (b) Invalid counterexamples found at `(k, len)` replay at `(k + 1, len + 1)`.
pub fn replays_at_larger_bounds(
    spec: &str,
    name: &str,
    k: usize,
    len: usize,
) -> Result<usize, String> {
    let class = contract(name);
    let mut n = 0;
    for (d, c) in counterexamples(spec, name, k, len) {
        if c.failure.kind == ccheck::checker::FailureKind::Infeasible {
            continue;
        }
        let wider = Counterexample {
            bounds: Bounds::new(k + 1, len + 1),
            ..c
        };
        if replay_counterexample(&wider, &d, &class) != Ok(true) {
            return Err(format!(
                "{spec} {name} {} found at k={k} len={len} fails at k={} len={}",
                d.name,
                k + 1,
                len + 1
            ));
        }
        n += 1;
    }
    Ok(n)
}

/// Clauses that may be conjoined to `feature` of `class`: `true` and every
/// postcondition clause some corpus contract gives a feature of that name,
/// when it only reads components `class` has.
pub fn strengthening_pool(class: &ContractClass, feature: &str) -> Vec<Expr> {
    let mut pool = vec![Expr::Bool(true)];
    for name in CONTRACTS {
        let other = contract(name);
        let Some(f) = other.feature(feature) else {
            continue;
        };
        for c in &f.postcondition {
            let foreign = c.expr.any(&|e| match e {
                Expr::Read { name, .. } => {
                    class.model_index(name).is_none() && class.query_index(name).is_none()
                }
                _ => false,
            });
            if !foreign && !pool.contains(&c.expr) {
                pool.push(c.expr.clone());
            }
        }
    }
    pool
}

pub fn strengthened(class: &ContractClass, feature: &str, clause: &Expr) -> ContractClass {
    let mut out = class.clone();
    let f = out.features.iter_mut().find(|f| f.name == feature).unwrap();
    f.postcondition
        .push(Clause::new(Some("extra"), clause.clone()));
    out
}

fn report(spec: &str, class: &ContractClass, k: usize, len: usize) -> CompletenessReport {
    check_completeness(&adt(spec), class, options(k, len)).unwrap()
}

/// (c) Conjoining `clause` to a command's postcondition never turns a
/// valid driver invalid or unprovable.
pub fn strengthening_is_safe(
    spec: &str,
    name: &str,
    feature: &str,
    clause: &Expr,
    k: usize,
    len: usize,
) -> Result<(), String> {
    let class = contract(name);
    let before = report(spec, &class, k, len);
    let after = report(spec, &strengthened(&class, feature, clause), k, len);
    for v in before.verdicts().filter(|v| v.is_valid()) {
        let now = after.verdict(&v.driver).unwrap().status;
        if matches!(
            now,
            VerdictStatus::Invalid | VerdictStatus::PreconditionUnprovable
        ) {
            return Err(format!(
                "{name}: {feature} ensure {clause} turns {} {now}",
                v.driver
            ));
        }
    }
    Ok(())
}

/// (d) Default equality is an equivalence on every state of `class`.
pub fn default_equality_laws(name: &str, k: usize, len: usize) -> Result<usize, String> {
    let mut class = contract(name);
    class.equality = None;
    let space = state_space(&class, Bounds::new(k, len)).unwrap();
    let eq = |a, b| equality_holds(&class, a, b).unwrap();
    let states = space.states();
    for a in states {
        if !eq(a, a) {
            return Err(format!("{name}: not reflexive"));
        }
        for b in states {
            if eq(a, b) != eq(b, a) {
                return Err(format!("{name}: not symmetric"));
            }
            if !eq(a, b) {
                continue;
            }
            for c in states {
                if eq(b, c) && !eq(a, c) {
                    return Err(format!("{name}: not transitive"));
                }
            }
        }
    }
    Ok(states.len())
}

/// (e) Printing and re-parsing every corpus file gives back the same value.
pub fn round_trips() -> Result<usize, String> {
    let mut n = 0;
    for spec in SPECS {
        let a = parse_adt(&read(spec)).unwrap();
        let again = parse_adt(&print_adt(&a)).map_err(|d| format!("{spec}: {d:?}"))?;
        if *again != *a || print_adt(&again) != print_adt(&a) {
            return Err(format!("{spec} does not round-trip"));
        }
        n += 1;
    }
    for name in CONTRACTS {
        let c = parse_contract(&read(name)).unwrap();
        let again = parse_contract(&print_contract(&c)).map_err(|d| format!("{name}: {d:?}"))?;
        if again != c || print_contract(&again) != print_contract(&c) {
            return Err(format!("{name} does not round-trip"));
        }
        n += 1;
    }
    for (golden, class) in [
        ("golden/stack.drivers", "stack_model.ct"),
        ("golden/stack_no_axioms_forced.drivers", "stack_model.ct"),
    ] {
        let text = read(golden);
        let drivers =
            parse_drivers(&text, &contract(class)).map_err(|d| format!("{golden}: {d:?}"))?;
        if print_drivers(&drivers) != text {
            return Err(format!("{golden} does not round-trip"));
        }
        n += 1;
    }
    Ok(n)
}

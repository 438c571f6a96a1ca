//! Naive reference interpreter for driver verdicts. It shares only the
//! assertion evaluator with the library; states, environments, aliasing and
//! the demonic search are enumerated here with plain nested loops.

use ccheck::checker::VerdictStatus;
use ccheck::contract::{ContractClass, Environment, Evaluator, ObjectState, Value, ValueSort};
use ccheck::drivers::SpecDriver;

/// Every tuple of digits below the given radices, first digit slowest.
fn product(radix: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for r in radix {
        let mut next = Vec::new();
        for prefix in &out {
            for d in 0..*r {
                let mut t = prefix.clone();
                t.push(d);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

fn sequences(k: usize, max_len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for len in 0..=max_len {
        for t in product(&vec![k; len]) {
            out.push(t.into_iter().map(|e| e as u8).collect());
        }
    }
    out
}

fn holds(
    class: &ContractClass,
    raw: bool,
    e: &ccheck::contract::Expr,
    env: &Environment,
    old: Option<&Environment>,
    result: Option<&Value>,
) -> bool {
    let mut ev = if raw {
        Evaluator::raw(class)
    } else {
        Evaluator::new(class)
    };
    ev.holds(e, env, old, result).expect("well-typed assertion")
}

fn admissible(class: &ContractClass, s: &ObjectState) -> bool {
    let env = Environment::current(s.clone());
    for (qi, q) in class.queries().enumerate() {
        let defined = q
            .precondition
            .iter()
            .all(|c| holds(class, true, &c.expr, &env, None, None));
        if !defined {
            if s.slots[qi] != 0 {
                return false;
            }
            continue;
        }
        let result = match q.result_sort() {
            Some(ValueSort::Boolean) => Value::Bool(s.slots[qi] == 1),
            _ => Value::Elem(s.slots[qi]),
        };
        if !q
            .postcondition
            .iter()
            .all(|c| holds(class, false, &c.expr, &env, Some(&env), Some(&result)))
        {
            return false;
        }
    }
    true
}

pub fn states(class: &ContractClass, k: usize, max_len: usize) -> Vec<ObjectState> {
    let seqs = sequences(k, max_len);
    let slot_radix: Vec<usize> = class
        .queries()
        .map(|q| {
            if q.result_sort() == Some(ValueSort::Boolean) {
                2
            } else {
                k
            }
        })
        .collect();
    let mut out = Vec::new();
    for m in product(&vec![seqs.len(); class.model_fields.len()]) {
        for slots in product(&slot_radix) {
            let s = ObjectState {
                model: m.iter().map(|i| seqs[*i].clone()).collect(),
                slots: slots.iter().map(|v| *v as u8).collect(),
            };
            if admissible(class, &s) {
                out.push(s);
            }
        }
    }
    out
}

struct Ctx<'a> {
    class: &'a ContractClass,
    driver: &'a SpecDriver,
    space: Vec<ObjectState>,
    wide: Vec<ObjectState>,
}

fn consistent(class: &ContractClass, seen: &[ObjectState], s: &ObjectState) -> bool {
    class.model_fields.is_empty() || seen.iter().all(|t| t.model != s.model || t == s)
}

// Severity: 0 valid, 1 invalid, 2 precondition unprovable, 3 infeasible.
fn run(cx: &Ctx<'_>, env: &mut Environment, step: usize, seen: &mut Vec<ObjectState>) -> u8 {
    let class = cx.class;
    let Some(call) = cx.driver.body.get(step) else {
        for clause in &cx.driver.postcondition {
            let mut ev = Evaluator::new(class);
            let ok = ev
                .holds(clause, env, None, None)
                .expect("well-typed assertion");
            if !ev.notes.masked_reads.is_empty() {
                return 2;
            }
            if !ok {
                return 1;
            }
        }
        return 0;
    };
    let feature = class.feature(&call.feature).expect("known feature");
    let id = env.bindings[&call.target];
    let mut args = std::collections::BTreeMap::new();
    for (p, a) in feature.params.iter().zip(&call.args) {
        args.insert(
            p.name.clone(),
            Evaluator::new(class).eval(a, env, None, None).unwrap(),
        );
    }
    let before = env.call_scope(id, args);
    if !feature
        .precondition
        .iter()
        .all(|c| holds(class, false, &c.expr, &before, None, None))
    {
        return 2;
    }
    let satisfied = |s: &ObjectState| {
        let mut after = before.clone();
        after.states[id] = Some(s.clone());
        feature
            .postcondition
            .iter()
            .all(|c| holds(class, false, &c.expr, &after, Some(&before), None))
    };
    let posts: Vec<ObjectState> = cx.space.iter().filter(|s| satisfied(s)).cloned().collect();
    if posts.is_empty() {
        return if cx.wide.iter().any(satisfied) { 0 } else { 3 };
    }
    let mut worst = 0;
    for s in posts {
        if !consistent(class, seen, &s) {
            continue;
        }
        let old = env.states[id].replace(s.clone());
        seen.push(s);
        worst = worst.max(run(cx, env, step + 1, seen));
        seen.pop();
        env.states[id] = old;
    }
    worst
}

/// Verdict of `driver` at bounds `(k, max_len)`.
pub fn verdict(
    driver: &SpecDriver,
    class: &ContractClass,
    k: usize,
    max_len: usize,
) -> VerdictStatus {
    let cx = Ctx {
        class,
        driver,
        space: states(class, k, max_len),
        wide: if class.model_fields.is_empty() {
            Vec::new()
        } else {
            states(class, k, 2 * max_len + 1)
        },
    };
    let n = driver.objects.len();
    let radix: Vec<usize> = driver
        .params
        .iter()
        .map(|p| if p.sort == ValueSort::Boolean { 2 } else { k })
        .collect();
    let mut worst = 0;
    for ids in product(&vec![n; n]) {
        for picks in product(&vec![cx.space.len(); n]) {
            for values in product(&radix) {
                let mut env = Environment {
                    states: picks.iter().map(|p| Some(cx.space[*p].clone())).collect(),
                    ..Environment::default()
                };
                for (o, id) in driver.objects.iter().zip(&ids) {
                    env.bindings.insert(o.clone(), *id);
                }
                for l in &driver.locals {
                    env.bind_new(l, None);
                }
                for (p, v) in driver.params.iter().zip(&values) {
                    let value = if p.sort == ValueSort::Boolean {
                        Value::Bool(*v == 1)
                    } else {
                        Value::Elem(*v as u8)
                    };
                    env.params.insert(p.name.clone(), value);
                }
                let mut seen: Vec<ObjectState> = Vec::new();
                let mut ok = true;
                for id in &ids {
                    let s = env.states[*id].clone().expect("initial state");
                    ok &= consistent(class, &seen, &s);
                    seen.push(s);
                }
                if !ok
                    || !driver
                        .precondition
                        .iter()
                        .all(|c| holds(class, false, c, &env, None, None))
                {
                    continue;
                }
                worst = worst.max(run(&cx, &mut env, 0, &mut seen));
            }
        }
    }
    match worst {
        0 => VerdictStatus::Valid,
        1 => VerdictStatus::Invalid,
        2 => VerdictStatus::PreconditionUnprovable,
        _ => VerdictStatus::InfeasibleCall,
    }
}

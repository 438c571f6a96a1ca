//! Report serialization: the versioned JSON document and the text summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::checker::{
    CompletenessReport, Counterexample, DriverVerdict, Failure, ReplayError, Statistics, Step,
    VerdictStatus,
};
use crate::contract::{Bounds, ContractClass, ObjectState, SlotView, Value};
use crate::drivers::DriverFamily;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportJson {
    pub schema_version: u32,
    pub adt: String,
    pub class: String,
    pub bounds: Bounds,
    pub correct: bool,
    pub well_defined: bool,
    pub complete: bool,
    pub equivalence_required: bool,
    pub families: FamiliesJson,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamiliesJson {
    pub axiom: Vec<VerdictJson>,
    pub equivalence: Vec<VerdictJson>,
    pub well_definedness: Vec<VerdictJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictJson {
    pub driver: String,
    pub status: VerdictStatus,
    pub vacuous: bool,
    pub statistics: Statistics,
    pub counterexample: Option<CounterexampleJson>,
}

/// Component name to value; masked query slots are `null`.
pub type StateJson = BTreeMap<String, Json>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleJson {
    pub driver: String,
    pub driver_text: String,
    pub bounds: Bounds,
    pub objects: BTreeMap<String, usize>,
    pub params: BTreeMap<String, Json>,
    /// Initial state of each identity, indexed by identity.
    pub states: Vec<StateJson>,
    pub steps: Vec<StepJson>,
    pub failure: Failure,
    pub narrative: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepJson {
    pub call: usize,
    pub identity: usize,
    pub post_state: StateJson,
}

fn value_json(v: &Value) -> Json {
    match v {
        Value::Bool(b) => Json::Bool(*b),
        Value::Int(i) => Json::from(*i),
        Value::Elem(e) => Json::from(*e),
        Value::Seq(s) => Json::Array(s.iter().map(|e| Json::from(*e)).collect()),
        Value::Obj(id) => Json::from(*id),
        Value::Undef => Json::Null,
    }
}

pub fn state_json(state: &ObjectState, class: &ContractClass) -> StateJson {
    match state.view(class) {
        Ok(view) => view
            .into_iter()
            .map(|(name, v)| {
                let j = match v {
                    SlotView::Masked => Json::Null,
                    SlotView::Value(v) => value_json(&v),
                };
                (name, j)
            })
            .collect(),
        Err(_) => StateJson::new(),
    }
}

/// Rebuilds an abstract state of `class` from its JSON view.
pub fn state_from_json(
    json: &StateJson,
    class: &ContractClass,
) -> Result<ObjectState, ReplayError> {
    let stale = |m: String| ReplayError::Stale(m);
    let expected = class.model_fields.len() + class.queries().count();
    if json.len() != expected {
        return Err(stale(format!(
            "state has components {:?}, class {} has {expected}",
            json.keys().collect::<Vec<_>>(),
            class.name
        )));
    }
    let element = |j: &Json| j.as_u64().and_then(|e| u8::try_from(e).ok());
    let mut model = Vec::new();
    for field in &class.model_fields {
        let seq = json
            .get(&field.name)
            .and_then(Json::as_array)
            .and_then(|a| a.iter().map(element).collect::<Option<Vec<u8>>>())
            .ok_or_else(|| stale(format!("missing or malformed model field `{}`", field.name)))?;
        model.push(seq);
    }
    let mut slots = Vec::new();
    for q in class.queries() {
        let v = json
            .get(&q.name)
            .ok_or_else(|| stale(format!("missing query `{}`", q.name)))?;
        let raw = match v {
            Json::Null => Some(0),
            Json::Bool(b) => Some(u8::from(*b)),
            other => element(other),
        };
        slots.push(raw.ok_or_else(|| stale(format!("malformed value for `{}`", q.name)))?);
    }
    Ok(ObjectState { model, slots })
}

pub fn counterexample_json(
    cex: &Counterexample,
    class: &ContractClass,
    driver_text: &str,
    narrative: &[String],
) -> CounterexampleJson {
    CounterexampleJson {
        driver: cex.driver.clone(),
        driver_text: driver_text.to_string(),
        bounds: cex.bounds,
        objects: cex.objects.iter().cloned().collect(),
        params: cex
            .params
            .iter()
            .map(|(n, v)| (n.clone(), value_json(v)))
            .collect(),
        states: cex.initial.iter().map(|s| state_json(s, class)).collect(),
        steps: cex
            .steps
            .iter()
            .map(|s| StepJson {
                call: s.call,
                identity: s.identity,
                post_state: state_json(&s.post_state, class),
            })
            .collect(),
        failure: cex.failure.clone(),
        narrative: narrative.to_vec(),
    }
}

/// Reads a counterexample back against `class`; mismatching components
/// make the trace stale.
pub fn counterexample_from_json(
    json: &CounterexampleJson,
    class: &ContractClass,
) -> Result<Counterexample, ReplayError> {
    let mut params = Vec::new();
    for (name, v) in &json.params {
        let value = match v {
            Json::Bool(b) => Value::Bool(*b),
            other => Value::Elem(
                other
                    .as_u64()
                    .and_then(|e| u8::try_from(e).ok())
                    .ok_or_else(|| {
                        ReplayError::Stale(format!("malformed value for parameter `{name}`"))
                    })?,
            ),
        };
        params.push((name.clone(), value));
    }
    Ok(Counterexample {
        driver: json.driver.clone(),
        bounds: json.bounds,
        objects: json
            .objects
            .iter()
            .map(|(n, id)| (n.clone(), *id))
            .collect(),
        initial: json
            .states
            .iter()
            .map(|s| state_from_json(s, class))
            .collect::<Result<_, _>>()?,
        params,
        steps: json
            .steps
            .iter()
            .map(|s| {
                Ok(Step {
                    call: s.call,
                    identity: s.identity,
                    post_state: state_from_json(&s.post_state, class)?,
                })
            })
            .collect::<Result<_, ReplayError>>()?,
        failure: json.failure.clone(),
    })
}

fn verdict_json(v: &DriverVerdict, class: &ContractClass) -> VerdictJson {
    VerdictJson {
        driver: v.driver.clone(),
        status: v.status,
        vacuous: v.vacuous,
        statistics: v.statistics,
        counterexample: v
            .counterexample
            .as_ref()
            .map(|c| counterexample_json(c, class, &v.driver_text, &v.narrative)),
    }
}

pub fn report_json(report: &CompletenessReport, class: &ContractClass) -> ReportJson {
    let family = |f| {
        report
            .family(f)
            .iter()
            .map(|v| verdict_json(v, class))
            .collect()
    };
    ReportJson {
        schema_version: SCHEMA_VERSION,
        adt: report.adt.clone(),
        class: report.class.clone(),
        bounds: report.bounds,
        correct: report.correct,
        well_defined: report.well_defined,
        complete: report.complete,
        equivalence_required: report.equivalence_required,
        families: FamiliesJson {
            axiom: family(DriverFamily::Axiom),
            equivalence: family(DriverFamily::Equivalence),
            well_definedness: family(DriverFamily::WellDefinedness),
        },
        exit_code: report.exit_code(),
    }
}

/// Pretty-printed JSON with a trailing newline.
pub fn render_json(report: &CompletenessReport, class: &ContractClass) -> String {
    let mut s =
        serde_json::to_string_pretty(&report_json(report, class)).expect("report serializes");
    s.push('\n');
    s
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn render_text(report: &CompletenessReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} against {} at {}",
        report.adt, report.class, report.bounds
    );
    for family in DriverFamily::ALL {
        let verdicts = report.family(family);
        let note = match family {
            DriverFamily::Equivalence if !report.equivalence_required => {
                " (not required for correctness)"
            }
            _ => "",
        };
        let _ = writeln!(out, "\n{family} drivers{note}");
        let width = verdicts.iter().map(|v| v.driver.len()).max().unwrap_or(0);
        for v in verdicts {
            let vacuous = if v.vacuous {
                " (vacuous: no execution reached the postcondition)"
            } else {
                ""
            };
            let _ = writeln!(out, "  {:width$}  {}{vacuous}", v.driver, v.status);
            for line in &v.narrative {
                let _ = writeln!(out, "      {line}");
            }
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "correct: {}", yes_no(report.correct));
    let _ = writeln!(out, "well-defined: {}", yes_no(report.well_defined));
    let _ = writeln!(out, "complete: {}", yes_no(report.complete));
    out
}

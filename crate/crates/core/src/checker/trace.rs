use std::fmt;

use serde::{Deserialize, Serialize};

use crate::contract::{Bounds, ContractClass, ObjectState, Value};
use crate::drivers::SpecDriver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// A driver postcondition clause is false.
    Postcondition,
    /// A driver postcondition clause reads a query outside its precondition.
    MaskedRead,
    /// The callee precondition does not hold before a call.
    Precondition,
    /// No post-state satisfies the callee postcondition.
    Infeasible,
}

/// What went wrong and where: `index` counts driver postcondition clauses
/// for the first two kinds and body calls for the others.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub index: usize,
    /// The offending clause (labelled when the contract labels it).
    pub clause: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    /// Index of the call in the driver body.
    pub call: usize,
    pub identity: usize,
    pub post_state: ObjectState,
}

/// One execution of a driver that witnesses a failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub driver: String,
    pub bounds: Bounds,
    /// Driver arguments and the identity each denotes.
    pub objects: Vec<(String, usize)>,
    /// Initial state of each identity among the arguments.
    pub initial: Vec<ObjectState>,
    pub params: Vec<(String, Value)>,
    pub steps: Vec<Step>,
    pub failure: Failure,
}

impl Counterexample {
    /// Step-by-step account of the execution.
    pub fn narrative(&self, driver: &SpecDriver, class: &ContractClass) -> Vec<String> {
        let mut lines = Vec::new();
        let mut objs: Vec<String> = self
            .objects
            .iter()
            .map(|(n, id)| format!("{n} = #{id} {}", self.initial[*id].describe(class)))
            .collect();
        objs.extend(self.params.iter().map(|(n, v)| format!("{n} = {v}")));
        lines.push(format!("initially {}", objs.join(", ")));
        let mut locals = Vec::new();
        for step in &self.steps {
            let call = &driver.body[step.call];
            if call.creation {
                locals.push((call.target.clone(), step.identity));
            }
            lines.push(format!(
                "{}. {call}: {} becomes #{} {}",
                step.call + 1,
                call.target,
                step.identity,
                step.post_state.describe(class)
            ));
        }
        let f = &self.failure;
        lines.push(match f.kind {
            FailureKind::Postcondition => format!("post {} violated", f.clause),
            FailureKind::MaskedRead => {
                format!("post {} reads a query outside its precondition", f.clause)
            }
            FailureKind::Precondition => match driver.body.get(f.index) {
                Some(call) => format!(
                    "{}. {call}: precondition {} violated",
                    f.index + 1,
                    f.clause
                ),
                None => format!("precondition {} violated", f.clause),
            },
            FailureKind::Infeasible => match driver.body.get(f.index) {
                Some(call) => format!(
                    "{}. {call}: no state satisfies postcondition {}",
                    f.index + 1,
                    f.clause
                ),
                None => format!("no state satisfies postcondition {}", f.clause),
            },
        });
        lines
    }
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureKind::Postcondition => "postcondition",
            FailureKind::MaskedRead => "masked_read",
            FailureKind::Precondition => "precondition",
            FailureKind::Infeasible => "infeasible",
        })
    }
}

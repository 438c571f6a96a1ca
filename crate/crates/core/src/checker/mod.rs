//! Bounded demonic checking of specification drivers.
//!
//! Every initial environment (object aliasing, abstract states, parameter
//! values) that satisfies a driver's precondition is explored, and after
//! each call every post-state the callee's postcondition admits is taken.
//! A driver is valid when its postcondition holds on all of them.

mod replay;
mod search;
mod trace;

pub use replay::{replay_counterexample, ReplayError};
pub use search::partitions;
pub use trace::{Counterexample, Failure, FailureKind, Step};

use std::fmt;
use std::sync::atomic::AtomicU64;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adt::ValidatedAdtSpec;
use crate::contract::{state_space, Bounds, ContractClass, EvalError, StateSpace, StateSpaceError};
use crate::drivers::{generate_drivers, DriverFamily, GenError, GeneratedDrivers, SpecDriver};
use crate::dsl::print_driver;
use search::{ExtendedSpace, Outcome, Search, Witness};

pub const DEFAULT_BRANCH_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("bounds-too-small: {0}")]
    BoundsTooSmall(String),
    #[error("resource-limit: {0}")]
    ResourceLimit(String),
    #[error("driver does not match the class: {0}")]
    DriverMismatch(String),
    #[error(transparent)]
    Generation(#[from] GenError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("cannot start worker threads: {0}")]
    Threads(String),
}

impl CheckError {
    fn from_space(e: StateSpaceError) -> CheckError {
        match e {
            StateSpaceError::InvalidBounds(_) | StateSpaceError::Empty(_) => {
                CheckError::BoundsTooSmall(e.to_string())
            }
            StateSpaceError::TooLarge { .. } => CheckError::ResourceLimit(e.to_string()),
            StateSpaceError::Eval(e) => CheckError::Eval(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub bounds: Bounds,
    /// Maximum number of post-state choices explored per driver.
    pub branch_cap: u64,
    /// Worker threads: 0 picks automatically, 1 runs sequentially.
    pub threads: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            bounds: Bounds::default(),
            branch_cap: DEFAULT_BRANCH_CAP,
            threads: 0,
        }
    }
}

impl CheckOptions {
    /// Defaults, with the thread count taken from `CCHECK_THREADS`.
    pub fn from_env() -> Self {
        let threads = std::env::var("CCHECK_THREADS")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(0);
        CheckOptions {
            threads,
            ..CheckOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Valid,
    Invalid,
    PreconditionUnprovable,
    InfeasibleCall,
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictStatus::Valid => "valid",
            VerdictStatus::Invalid => "invalid",
            VerdictStatus::PreconditionUnprovable => "precondition_unprovable",
            VerdictStatus::InfeasibleCall => "infeasible_call",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statistics {
    /// Initial environments satisfying the driver precondition.
    pub environments: u64,
    /// Post-state choices taken.
    pub branches: u64,
    /// Complete executions whose postcondition was evaluated.
    pub executions: u64,
    /// Branches cut by model conflicts or the length cutoff.
    pub pruned: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DriverVerdict {
    pub driver: String,
    pub family: DriverFamily,
    pub status: VerdictStatus,
    /// Valid only because no execution reached the postcondition.
    pub vacuous: bool,
    pub statistics: Statistics,
    pub counterexample: Option<Counterexample>,
    pub driver_text: String,
    pub narrative: Vec<String>,
}

impl DriverVerdict {
    pub fn is_valid(&self) -> bool {
        self.status == VerdictStatus::Valid
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessReport {
    pub bounds: Bounds,
    pub adt: String,
    pub class: String,
    pub axiom: Vec<DriverVerdict>,
    pub equivalence: Vec<DriverVerdict>,
    pub well_definedness: Vec<DriverVerdict>,
    /// Correctness depends on the equivalence drivers.
    pub equivalence_required: bool,
    pub correct: bool,
    pub well_defined: bool,
    pub complete: bool,
}

impl CompletenessReport {
    pub fn family(&self, family: DriverFamily) -> &[DriverVerdict] {
        match family {
            DriverFamily::Axiom => &self.axiom,
            DriverFamily::Equivalence => &self.equivalence,
            DriverFamily::WellDefinedness => &self.well_definedness,
        }
    }

    pub fn verdicts(&self) -> impl Iterator<Item = &DriverVerdict> {
        self.axiom
            .iter()
            .chain(&self.equivalence)
            .chain(&self.well_definedness)
    }

    pub fn verdict(&self, driver: &str) -> Option<&DriverVerdict> {
        self.verdicts().find(|v| v.driver == driver)
    }

    /// 3 when some call is infeasible, 0 when complete, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self
            .verdicts()
            .any(|v| v.status == VerdictStatus::InfeasibleCall)
        {
            3
        } else if self.complete {
            0
        } else {
            1
        }
    }
}

enum Runner {
    Sequential,
    Global,
    Pool(rayon::ThreadPool),
}

impl Runner {
    fn new(threads: usize) -> Result<Runner, CheckError> {
        Ok(match threads {
            0 => Runner::Global,
            1 => Runner::Sequential,
            n => Runner::Pool(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| CheckError::Threads(e.to_string()))?,
            ),
        })
    }

    fn run(&self, search: &Search<'_>) -> Result<Outcome, CheckError> {
        let parallel = || {
            (0..search.total)
                .into_par_iter()
                .map(|i| search.run(i))
                .try_reduce(Outcome::default, |a, b| Ok(a.merge(b)))
        };
        match self {
            Runner::Sequential => (0..search.total)
                .try_fold(Outcome::default(), |acc, i| Ok(acc.merge(search.run(i)?))),
            Runner::Global => parallel(),
            Runner::Pool(pool) => pool.install(parallel),
        }
    }
}

/// Shared per-class data for checking several drivers.
struct Checker<'a> {
    class: &'a ContractClass,
    options: CheckOptions,
    space: StateSpace,
    extended: ExtendedSpace<'a>,
    runner: Runner,
}

impl<'a> Checker<'a> {
    fn new(class: &'a ContractClass, options: CheckOptions) -> Result<Self, CheckError> {
        let k = options.bounds.elements;
        if let Some(j) = class.max_element_literal().filter(|j| *j as usize >= k) {
            return Err(CheckError::BoundsTooSmall(format!(
                "the class mentions element #{j} but only {k} element(s) exist"
            )));
        }
        let space = state_space(class, options.bounds).map_err(CheckError::from_space)?;
        Ok(Checker {
            class,
            options,
            space,
            extended: ExtendedSpace::new(class, options.bounds),
            runner: Runner::new(options.threads)?,
        })
    }

    fn check(&self, driver: &SpecDriver) -> Result<DriverVerdict, CheckError> {
        let k = self.options.bounds.elements;
        if let Some(j) = driver.max_element_literal().filter(|j| *j as usize >= k) {
            return Err(CheckError::BoundsTooSmall(format!(
                "driver {} mentions element #{j} but only {k} element(s) exist",
                driver.name
            )));
        }
        let branches = AtomicU64::new(0);
        let search = Search::new(
            self.class,
            driver,
            &self.space,
            &self.extended,
            self.options.branch_cap,
            &branches,
        )?;
        let outcome = self.runner.run(&search)?;
        let [infeasible, unprovable, invalid] = outcome.witnesses;
        let (status, witness) = if let Some(w) = infeasible {
            (VerdictStatus::InfeasibleCall, Some(w))
        } else if let Some(w) = unprovable {
            (VerdictStatus::PreconditionUnprovable, Some(w))
        } else if let Some(w) = invalid {
            (VerdictStatus::Invalid, Some(w))
        } else {
            (VerdictStatus::Valid, None)
        };
        let counterexample = witness.map(|w| counterexample(driver, self.options.bounds, w));
        let narrative = counterexample
            .as_ref()
            .map(|c| c.narrative(driver, self.class))
            .unwrap_or_default();
        Ok(DriverVerdict {
            driver: driver.name.clone(),
            family: driver.family(),
            status,
            vacuous: status == VerdictStatus::Valid && outcome.stats.executions == 0,
            statistics: outcome.stats,
            counterexample,
            driver_text: print_driver(driver),
            narrative,
        })
    }
}

fn counterexample(driver: &SpecDriver, bounds: Bounds, w: Witness) -> Counterexample {
    let objects = driver
        .objects
        .iter()
        .map(|o| (o.clone(), w.initial.bindings[o]))
        .collect();
    let params = driver
        .params
        .iter()
        .map(|p| (p.name.clone(), w.initial.params[&p.name].clone()))
        .collect();
    Counterexample {
        driver: driver.name.clone(),
        bounds,
        objects,
        initial: w.initial.states.iter().flatten().cloned().collect(),
        params,
        steps: w.steps,
        failure: w.failure,
    }
}

/// Checks one driver against `class`.
pub fn check_driver(
    driver: &SpecDriver,
    class: &ContractClass,
    options: CheckOptions,
) -> Result<DriverVerdict, CheckError> {
    Checker::new(class, options)?.check(driver)
}

/// Checks already generated drivers and aggregates the verdicts.
pub fn check_generated(
    adt_name: &str,
    drivers: &GeneratedDrivers,
    class: &ContractClass,
    options: CheckOptions,
) -> Result<CompletenessReport, CheckError> {
    let checker = Checker::new(class, options)?;
    let run = |set: &[SpecDriver]| {
        set.iter()
            .map(|d| checker.check(d))
            .collect::<Result<Vec<_>, _>>()
    };
    let axiom = run(&drivers.axiom)?;
    let equivalence = run(&drivers.equivalence)?;
    let well_definedness = run(&drivers.well_definedness)?;
    let all_valid = |v: &[DriverVerdict]| v.iter().all(DriverVerdict::is_valid);
    let correct = all_valid(&axiom) && (!drivers.equivalence_required || all_valid(&equivalence));
    let well_defined = all_valid(&well_definedness);
    Ok(CompletenessReport {
        bounds: options.bounds,
        adt: adt_name.to_string(),
        class: class.name.clone(),
        axiom,
        equivalence,
        well_definedness,
        equivalence_required: drivers.equivalence_required,
        correct,
        well_defined,
        complete: correct && well_defined,
    })
}

/// Generates every driver for `adt` and `class` and checks them.
pub fn check_completeness(
    adt: &ValidatedAdtSpec,
    class: &ContractClass,
    options: CheckOptions,
) -> Result<CompletenessReport, CheckError> {
    let drivers = generate_drivers(adt, class)?;
    check_generated(&adt.name, &drivers, class, options)
}

#![allow(dead_code)]

pub mod oracle;
pub mod props;
pub mod schema;

use std::path::PathBuf;

use ccheck::adt::ValidatedAdtSpec;
use ccheck::checker::{check_generated, CheckOptions, VerdictStatus};
use ccheck::contract::{Bounds, ContractClass};
use ccheck::drivers::generate_drivers;
use ccheck::dsl::{parse_adt, parse_contract};

pub fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(corpus(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn adt(name: &str) -> ValidatedAdtSpec {
    parse_adt(&read(name)).unwrap_or_else(|d| panic!("{name}: {d:?}"))
}

pub fn contract(name: &str) -> ContractClass {
    parse_contract(&read(name)).unwrap_or_else(|d| panic!("{name}: {d:?}"))
}

pub const CONTRACTS: &[&str] = &[
    "stack_weak.ct",
    "stack_malicious.ct",
    "stack_model.ct",
    "stack_model_no_is_empty_definition.ct",
    "stack_model_asymmetric_equality.ct",
    "stack_inconsistent.ct",
];

pub const SPECS: &[&str] = &["stack.adt", "stack_no_axioms.adt"];

/// Checker and oracle verdicts for every driver of every (spec, contract)
/// pair in the corpus at bounds `(k, len)`, as `(label, checker, oracle)`.
pub fn compare_with_oracle(k: usize, len: usize) -> Vec<(String, VerdictStatus, VerdictStatus)> {
    let mut out = Vec::new();
    for spec in SPECS {
        let adt = adt(spec);
        for name in CONTRACTS {
            let class = contract(name);
            let drivers = generate_drivers(&adt, &class).unwrap();
            let options = CheckOptions {
                bounds: Bounds::new(k, len),
                ..CheckOptions::default()
            };
            let report = check_generated(&adt.name, &drivers, &class, options).unwrap();
            for d in drivers
                .axiom
                .iter()
                .chain(&drivers.equivalence)
                .chain(&drivers.well_definedness)
            {
                let ours = report.verdict(&d.name).unwrap().status;
                let theirs = oracle::verdict(d, &class, k, len);
                out.push((
                    format!("{spec} {name} {} k={k} len={len}", d.name),
                    ours,
                    theirs,
                ));
            }
        }
    }
    out
}

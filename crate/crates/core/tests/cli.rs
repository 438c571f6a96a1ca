mod support;

use std::process::{Command, Output};

use serde_json::Value;
use support::corpus;

fn ccheck(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccheck"))
        .args(args)
        .env("CCHECK_THREADS", threads)
        .output()
        .expect("run ccheck")
}

fn path(name: &str) -> String {
    corpus(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn check(contract: &str, extra: &[&str]) -> Output {
    let (adt, ct) = (path("stack.adt"), path(contract));
    let mut args = vec!["check", adt.as_str(), ct.as_str()];
    args.extend_from_slice(extra);
    ccheck(&args, "0")
}

#[test]
fn model_contract_is_complete() {
    let o = check("stack_model.ct", &["--k", "2", "--len", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("complete: yes"));
    assert!(!text.contains("invalid"));
}

#[test]
fn weak_contract_prints_the_a2_trace() {
    let o = check("stack_weak.ct", &["--k", "2", "--len", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("axiom_A2  invalid"));
    assert!(text.contains("      post s1.is_equal(s2) violated"));
    assert!(text.contains("complete: no"));
}

#[test]
fn missing_file_is_an_input_error() {
    let o = check("missing.ct", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.ct: error: cannot read file"));
}

#[test]
fn parse_errors_are_located() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ct");
    std::fs::write(
        &bad,
        "class S[G]\ncreate new\ncommand new\nquery q: G ensure Result = \n",
    )
    .unwrap();
    let adt = path("stack.adt");
    let o = ccheck(&["check", &adt, bad.to_str().unwrap()], "0");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.ct:5:1: error:"), "{}", stderr(&o));
}

#[test]
fn unmapped_function_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let ct = dir.path().join("no_remove.ct");
    let text = support::read("stack_weak.ct").replace(
        "command remove\n    require\n        p1: not is_empty\n",
        "",
    );
    std::fs::write(&ct, text).unwrap();
    let adt = path("stack.adt");
    let o = ccheck(&["check", &adt, ct.to_str().unwrap()], "0");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unmapped-function"), "{}", stderr(&o));
}

#[test]
fn inconsistent_contract_exits_3() {
    let o = check("stack_inconsistent.ct", &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("infeasible_call"));
}

#[test]
fn checker_limits_exit_5() {
    let o = check("stack_model.ct", &["--branch-cap", "3"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("resource-limit"));

    let dir = tempfile::tempdir().unwrap();
    let ct = dir.path().join("literal.ct");
    let text = support::read("stack_weak.ct").replace("a1: item = x", "a1: item = x or item = #3");
    std::fs::write(&ct, text).unwrap();
    let adt = path("stack.adt");
    let o = ccheck(&["check", &adt, ct.to_str().unwrap()], "0");
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("bounds-too-small"), "{}", stderr(&o));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(
        check("stack_model.ct", &["--k", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        check("stack_model.ct", &["--format", "xml"]).status.code(),
        Some(2)
    );
    assert_eq!(ccheck(&["--help"], "0").status.code(), Some(0));
}

#[test]
fn json_reports_validate_and_are_byte_stable() {
    let schema = support::schema::load();
    for contract in support::CONTRACTS {
        let first = check(contract, &["--format", "json"]);
        let adt = path("stack.adt");
        let ct = path(contract);
        let sequential = ccheck(&["check", &adt, &ct, "--format", "json"], "1");
        let four = ccheck(&["check", &adt, &ct, "--format", "json"], "4");
        assert_eq!(first.stdout, sequential.stdout, "{contract}");
        assert_eq!(first.stdout, four.stdout, "{contract}");
        let doc: Value = serde_json::from_slice(&first.stdout).unwrap();
        assert_eq!(
            support::schema::validate(&schema, &doc),
            Vec::<String>::new(),
            "{contract}"
        );
        // The exit code is recorded in, and follows from, the report.
        assert_eq!(
            doc["exit_code"].as_i64().map(|c| c as i32),
            first.status.code()
        );
    }
}

#[test]
fn exit_code_mapping() {
    let expected = [
        ("stack_weak.ct", 1),
        ("stack_malicious.ct", 1),
        ("stack_model.ct", 0),
        ("stack_model_no_is_empty_definition.ct", 1),
        ("stack_model_asymmetric_equality.ct", 1),
        ("stack_inconsistent.ct", 3),
    ];
    for (contract, code) in expected {
        let o = check(contract, &["--format", "json"]);
        let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
        let statuses: Vec<&str> = ["axiom", "equivalence", "well_definedness"]
            .iter()
            .flat_map(|f| doc["families"][f].as_array().unwrap())
            .map(|v| v["status"].as_str().unwrap())
            .collect();
        let derived = if statuses.contains(&"infeasible_call") {
            3
        } else if doc["complete"] == Value::Bool(true) {
            0
        } else {
            1
        };
        assert_eq!(o.status.code(), Some(code), "{contract}");
        assert_eq!(derived, code, "{contract}");
    }
}

#[test]
fn out_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = check(
        "stack_weak.ct",
        &["--format", "json", "--out", out.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["schema_version"], 1);
}

#[test]
fn drivers_match_golden_listings() {
    let cases = [
        ("stack.adt", "stack_model.ct", false, "golden/stack.drivers"),
        ("stack.adt", "stack_weak.ct", false, "golden/stack.drivers"),
        (
            "stack_no_axioms.adt",
            "stack_model.ct",
            false,
            "golden/stack_no_axioms.drivers",
        ),
        (
            "stack_no_axioms.adt",
            "stack_model.ct",
            true,
            "golden/stack_no_axioms_forced.drivers",
        ),
    ];
    for (adt, ct, force, golden) in cases {
        let (adt, ct) = (path(adt), path(ct));
        let mut args = vec!["drivers", adt.as_str(), ct.as_str()];
        if force {
            args.push("--force-equivalence-drivers");
        }
        let o = ccheck(&args, "0");
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o), support::read(golden), "{golden}");
    }
}

fn weak_report(dir: &std::path::Path) -> std::path::PathBuf {
    let out = dir.join("weak.json");
    check(
        "stack_weak.ct",
        &["--format", "json", "--out", out.to_str().unwrap()],
    );
    out
}

#[test]
fn explain_replays_the_a2_trace() {
    let dir = tempfile::tempdir().unwrap();
    let report = weak_report(dir.path());
    let (adt, weak) = (path("stack.adt"), path("stack_weak.ct"));
    let o = ccheck(&["explain", &adt, &weak, report.to_str().unwrap()], "0");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("axiom_A2 at k=2, len=3\n"));
    assert!(text.trim_end().ends_with("post s1.is_equal(s2) violated"));

    // A bare counterexample works too.
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let bare = dir.path().join("remove.json");
    let cex = &doc["families"]["well_definedness"][1]["counterexample"];
    std::fs::write(&bare, serde_json::to_string(cex).unwrap()).unwrap();
    let o = ccheck(&["explain", &adt, &weak, bare.to_str().unwrap()], "0");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("remove_is_well_defined"));

    let o = ccheck(
        &[
            "explain",
            &adt,
            &weak,
            report.to_str().unwrap(),
            "--driver",
            "remove_is_well_defined",
        ],
        "0",
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("remove_is_well_defined"));
}

#[test]
fn explain_against_the_model_contract_is_stale() {
    let dir = tempfile::tempdir().unwrap();
    let report = weak_report(dir.path());
    let (adt, model) = (path("stack.adt"), path("stack_model.ct"));
    let o = ccheck(&["explain", &adt, &model, report.to_str().unwrap()], "0");
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("stale-trace"));
}

#[test]
fn explain_with_a_no_longer_failing_trace_exits_4() {
    // Same shapes, but remove now restores the stack, so the trace's
    // post-state of remove violates the strengthened postcondition.
    let dir = tempfile::tempdir().unwrap();
    let report = weak_report(dir.path());
    let ct = dir.path().join("stronger.ct");
    let text = support::read("stack_weak.ct").replace(
        "        p1: not is_empty\n",
        "        p1: not is_empty\n    ensure\n        not is_empty\n",
    );
    std::fs::write(&ct, text).unwrap();
    let adt = path("stack.adt");
    let o = ccheck(
        &[
            "explain",
            &adt,
            ct.to_str().unwrap(),
            report.to_str().unwrap(),
        ],
        "0",
    );
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn explain_rejects_malformed_traces() {
    let dir = tempfile::tempdir().unwrap();
    let report = weak_report(dir.path());
    let full = std::fs::read_to_string(&report).unwrap();
    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, &full[..full.len() / 2]).unwrap();
    let (adt, weak) = (path("stack.adt"), path("stack_weak.ct"));
    let o = ccheck(&["explain", &adt, &weak, truncated.to_str().unwrap()], "0");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("malformed trace"));
}

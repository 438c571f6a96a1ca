//! The `ccheck` command line: `check`, `drivers` and `explain`.
//!
//! Exit codes: 0 complete (or trace still witnesses), 1 some driver invalid
//! or unprovable, 2 input or usage error, 3 infeasible call, 4 stale trace,
//! 5 checker limit (bounds too small, resource cap).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::adt::ValidatedAdtSpec;
use crate::checker::{
    check_generated, replay_counterexample, CheckOptions, ReplayError, DEFAULT_BRANCH_CAP,
};
use crate::contract::{Bounds, ContractClass};
use crate::drivers::generate_drivers;
use crate::dsl::{in_file, parse_adt, parse_contract, print_drivers};
use crate::report::{
    counterexample_from_json, render_json, render_text, CounterexampleJson, ReportJson,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCOMPLETE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_STALE: i32 = 4;
pub const EXIT_LIMIT: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "ccheck",
    version,
    about = "Check that class contracts capture an abstract data type"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate every driver and check it against the contract.
    Check(CheckArgs),
    /// Print the generated drivers without checking them.
    Drivers(DriversArgs),
    /// Replay a counterexample and narrate it.
    Explain(ExplainArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct Inputs {
    /// Abstract data type specification.
    adt: PathBuf,
    /// Contracted class.
    contract: PathBuf,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Number of distinct elements.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..=Bounds::MAX_ELEMENTS as u64))]
    k: u64,
    /// Maximum model sequence length.
    #[arg(long, default_value_t = 3)]
    len: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Make correctness depend on the equivalence drivers even when no
    /// axiom driver uses is_equal.
    #[arg(long)]
    force_equivalence_drivers: bool,
    /// Maximum number of branches explored per driver.
    #[arg(long, default_value_t = DEFAULT_BRANCH_CAP)]
    branch_cap: u64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DriversArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// List equivalence drivers even when no axiom driver uses is_equal.
    #[arg(long)]
    force_equivalence_drivers: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExplainArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// A counterexample, or a JSON report containing one.
    trace: PathBuf,
    /// Driver whose counterexample to take from a report (default: the first).
    #[arg(long)]
    driver: Option<String>,
}

/// A failed command: message for standard error and exit code.
struct Failure(i32, String);

type CmdResult = Result<(i32, String), Failure>;

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                EXIT_INPUT
            } else {
                let _ = write!(stdout, "{e}");
                EXIT_OK
            };
            return code;
        }
    };
    let (result, out) = match &cli.command {
        Command::Check(a) => (cmd_check(a), a.out.as_deref()),
        Command::Drivers(a) => (cmd_drivers(a), a.out.as_deref()),
        Command::Explain(a) => (cmd_explain(a), None),
    };
    match result {
        Ok((code, text)) => {
            match out {
                Some(path) => {
                    if let Err(e) = fs::write(path, &text) {
                        let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                        return EXIT_INPUT;
                    }
                }
                None => {
                    let _ = stdout.write_all(text.as_bytes());
                }
            }
            code
        }
        Err(Failure(code, message)) => {
            let _ = writeln!(stderr, "{message}");
            code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| {
        Failure(
            EXIT_INPUT,
            format!("{}: error: cannot read file: {e}", path.display()),
        )
    })
}

fn diagnostics(diags: Vec<crate::dsl::SourceDiagnostic>, path: &Path) -> Failure {
    let lines: Vec<String> = in_file(diags, path)
        .iter()
        .map(ToString::to_string)
        .collect();
    Failure(EXIT_INPUT, lines.join("\n"))
}

fn load(inputs: &Inputs) -> Result<(ValidatedAdtSpec, ContractClass), Failure> {
    let adt_text = read(&inputs.adt)?;
    let class_text = read(&inputs.contract)?;
    let adt = parse_adt(&adt_text).map_err(|d| diagnostics(d, &inputs.adt))?;
    let class = parse_contract(&class_text).map_err(|d| diagnostics(d, &inputs.contract))?;
    Ok((adt, class))
}

fn cmd_check(a: &CheckArgs) -> CmdResult {
    let (adt, class) = load(&a.inputs)?;
    let mut drivers =
        generate_drivers(&adt, &class).map_err(|e| Failure(EXIT_INPUT, format!("error: {e}")))?;
    drivers.equivalence_required |= a.force_equivalence_drivers;
    let options = CheckOptions {
        bounds: Bounds::new(a.k as usize, a.len),
        branch_cap: a.branch_cap,
        ..CheckOptions::from_env()
    };
    let report = check_generated(&adt.name, &drivers, &class, options)
        .map_err(|e| Failure(EXIT_LIMIT, format!("error: {e}")))?;
    let text = match a.format {
        Format::Json => render_json(&report, &class),
        Format::Text => render_text(&report),
    };
    Ok((report.exit_code(), text))
}

fn cmd_drivers(a: &DriversArgs) -> CmdResult {
    let (adt, class) = load(&a.inputs)?;
    let drivers =
        generate_drivers(&adt, &class).map_err(|e| Failure(EXIT_INPUT, format!("error: {e}")))?;
    let mut text = print_drivers(drivers.listed(a.force_equivalence_drivers));
    if text.is_empty() {
        return Ok((EXIT_OK, text));
    }
    if !text.ends_with('\n') {
        text.push('\n');
    }
    Ok((EXIT_OK, text))
}

/// Finds the counterexample in a trace file: either a bare counterexample
/// or a report containing one.
fn trace_from(
    text: &str,
    path: &Path,
    driver: Option<&str>,
) -> Result<CounterexampleJson, Failure> {
    let malformed = |e: String| {
        Failure(
            EXIT_INPUT,
            format!("{}: error: malformed trace: {e}", path.display()),
        )
    };
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    if value.get("schema_version").is_some() {
        let report: ReportJson =
            serde_json::from_value(value).map_err(|e| malformed(e.to_string()))?;
        let families = [
            report.families.axiom,
            report.families.equivalence,
            report.families.well_definedness,
        ];
        return families
            .into_iter()
            .flatten()
            .filter(|v| driver.is_none_or(|d| v.driver == d))
            .find_map(|v| v.counterexample)
            .ok_or_else(|| malformed("the report contains no matching counterexample".into()));
    }
    let cex: CounterexampleJson =
        serde_json::from_value(value).map_err(|e| malformed(e.to_string()))?;
    if driver.is_some_and(|d| d != cex.driver) {
        return Err(malformed(format!("trace is for driver {}", cex.driver)));
    }
    Ok(cex)
}

fn cmd_explain(a: &ExplainArgs) -> CmdResult {
    let (adt, class) = load(&a.inputs)?;
    let trace_text = read(&a.trace)?;
    let json = trace_from(&trace_text, &a.trace, a.driver.as_deref())?;
    let drivers =
        generate_drivers(&adt, &class).map_err(|e| Failure(EXIT_INPUT, format!("error: {e}")))?;
    let stale = |m: String| Failure(EXIT_STALE, format!("stale-trace: {m}"));
    let Some(driver) = drivers
        .listed(true)
        .into_iter()
        .find(|d| d.name == json.driver)
    else {
        return Err(stale(format!("no driver named {}", json.driver)));
    };
    let cex = counterexample_from_json(&json, &class).map_err(|e| match e {
        ReplayError::Stale(m) => stale(m),
        other => Failure(EXIT_LIMIT, format!("error: {other}")),
    })?;
    match replay_counterexample(&cex, driver, &class) {
        Ok(true) => {
            let mut text = format!("{} at {}\n", driver.name, cex.bounds);
            for line in cex.narrative(driver, &class) {
                text.push_str("  ");
                text.push_str(&line);
                text.push('\n');
            }
            Ok((EXIT_OK, text))
        }
        Ok(false) => Err(stale(format!(
            "the trace is no longer a witness for {} under {}",
            driver.name, class.name
        ))),
        Err(ReplayError::Stale(m)) => Err(stale(m)),
        Err(e) => Err(Failure(EXIT_LIMIT, format!("error: {e}"))),
    }
}

//! Text formats: `.adt` specifications, `.ct` contracts and driver listings.
//!
//! All three formats are newline-insensitive keyword-block grammars with
//! `--` line comments. Parsers report [`SourceDiagnostic`]s with 1-based
//! positions; printers produce text the parsers read back to the same model.

mod adt;
mod contract;
mod driver;
mod expr;
mod lexer;

use std::fmt;
use std::path::Path;

use serde::Serialize;

pub use adt::{parse_adt, print_adt};
pub use contract::{parse_contract, print_contract};
pub use driver::{parse_driver, parse_drivers, print_driver, print_drivers};
pub use lexer::{tokenize, Tok, Token};

use crate::adt::AdtSpec;
use crate::contract::ContractClass;
use crate::drivers::SpecDriver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// A problem located in an input file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceDiagnostic {
    pub file: String,
    pub line: usize,
    pub column: usize,
    pub severity: Severity,
    pub message: String,
    /// Text of the offending token.
    pub token: String,
}

impl SourceDiagnostic {
    pub fn error(line: usize, column: usize, message: &str, token: &str) -> Self {
        SourceDiagnostic {
            file: "<input>".into(),
            line,
            column,
            severity: Severity::Error,
            message: message.to_string(),
            token: token.to_string(),
        }
    }

    pub fn in_file(mut self, file: &str) -> Self {
        self.file = file.to_string();
        self
    }
}

impl fmt::Display for SourceDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}: {}",
            self.file, self.line, self.column, self.severity, self.message
        )?;
        if !self.token.is_empty() {
            write!(f, " (at `{}`)", self.token)?;
        }
        Ok(())
    }
}

/// Tags every diagnostic with a file name.
pub fn in_file(diags: Vec<SourceDiagnostic>, file: &Path) -> Vec<SourceDiagnostic> {
    let name = file.display().to_string();
    diags.into_iter().map(|d| d.in_file(&name)).collect()
}

/// Renders a model in its text format.
pub trait PrettyPrint {
    fn pretty_print(&self) -> String;
}

impl PrettyPrint for AdtSpec {
    fn pretty_print(&self) -> String {
        print_adt(self)
    }
}

impl PrettyPrint for ContractClass {
    fn pretty_print(&self) -> String {
        print_contract(self)
    }
}

impl PrettyPrint for SpecDriver {
    fn pretty_print(&self) -> String {
        print_driver(self)
    }
}

pub fn pretty_print(x: &impl PrettyPrint) -> String {
    x.pretty_print()
}

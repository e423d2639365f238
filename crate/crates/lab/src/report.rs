//! The JSON report envelope shared by all subcommands.

use serde::Serialize;
use serde_json::Value;

use crate::io::Artifact;

/// One expectation and whether the run met it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: Value,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: impl Into<String>, observed: impl Into<Value>, pass: bool) -> Self {
        Self {
            name: name.into(),
            expected: expected.into(),
            observed: observed.into(),
            pass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Mismatch,
}

#[derive(Debug, Serialize)]
pub struct Report<'a, C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: &'a C,
    pub results: R,
    pub checks: &'a [Check],
    pub status: Status,
    pub artifacts: &'a [Artifact],
}

pub fn status(checks: &[Check]) -> Status {
    if checks.iter().all(|c| c.pass) {
        Status::Ok
    } else {
        Status::Mismatch
    }
}

/// Outcome of one subcommand, for the terminal summary and the exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: &'static str,
    pub checks: Vec<Check>,
    pub summary: Vec<String>,
    pub artifacts: Vec<Artifact>,
}

impl Outcome {
    pub fn status(&self) -> Status {
        status(&self.checks)
    }
}

/// Tail class of a fitted exponent: `"-2"`, `"-6"` or `"unclassified"`.
pub fn tail_class(exponent: f64, tol_discontinuous: f64, tol_continuous: f64) -> &'static str {
    if (exponent + 2.0).abs() <= tol_discontinuous {
        "-2"
    } else if (exponent + 6.0).abs() <= tol_continuous {
        "-6"
    } else {
        "unclassified"
    }
}

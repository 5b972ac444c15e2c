//! Command-line front end for `qsg-core`: reads matrix JSON, dispatches to
//! the library, and emits JSON values or verification [`Report`]s.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on input
//! errors (unreadable or malformed files, non-Hermitian matrices, dimension
//! mismatches, invalid arguments).

pub mod args;
pub mod batteries;
mod commands;
pub mod report;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;

use clap::Parser;

pub use args::Cli;
pub use report::{Check, Report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad files or arguments.
    Input(String),
    /// The computation itself failed.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Failure(_) => EXIT_FAIL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "input error: {msg}"),
            CliError::Failure(msg) => write!(f, "error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Result of one invocation: text to emit, exit code, and the report when
/// the command runs checks.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
    pub report: Option<Report>,
}

impl Outcome {
    fn value(output: String) -> Self {
        Self {
            code: EXIT_PASS,
            output,
            report: None,
        }
    }

    fn report(report: Report) -> Self {
        Self {
            code: if report.pass { EXIT_PASS } else { EXIT_FAIL },
            output: report.to_json(),
            report: Some(report),
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    commands::dispatch(cli)
}

/// Parses `args`, runs, writes the output and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("qsg: {e}");
            return e.exit_code();
        }
    };
    let mut text = outcome.output;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("qsg: cannot write output: {e}");
        return EXIT_INPUT;
    }
    if let Some(report) = &outcome.report {
        for c in report.checks.iter().filter(|c| !c.pass) {
            eprintln!(
                "qsg: check '{}' failed: residual {:e} > threshold {:e}",
                c.name, c.residual, c.threshold
            );
        }
    }
    outcome.code
}

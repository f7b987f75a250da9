//! Command-line harness: analytic sweeps, Monte-Carlo experiments, planner
//! runs and plan validation. Every output file is a pure function of the
//! command line, so reruns with the same `--seed` are byte-identical whatever
//! the `--jobs` setting.

pub mod algo;
pub mod analyze;
pub mod args;
pub mod plan;
pub mod simulate;
pub mod table;

use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;

pub use algo::Algo;
pub use args::{Cli, Command};
pub use table::{Format, Table};

/// Error carrying the process exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad arguments, unreadable input or a parse error (exit 2).
    Usage(String),
    /// The run completed but failed: no solution, budget exhausted or an
    /// invalid plan (exit 1).
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Usage(_) => 2,
        }
    }

    pub(crate) fn usage(e: impl fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

/// Reads `--spec`: inline JSON when it starts with `{`, otherwise a file path.
pub fn load_spec<T: DeserializeOwned>(arg: &str) -> Result<T, CliError> {
    let trimmed = arg.trim_start();
    let (text, origin) = if trimmed.starts_with('{') {
        (arg.to_string(), "inline spec".to_string())
    } else {
        let text = std::fs::read_to_string(arg)
            .map_err(|e| CliError::Usage(format!("cannot read spec {arg}: {e}")))?;
        (text, arg.to_string())
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{origin}: {e}")))
}

pub(crate) fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

/// Runs one parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(a) => analyze::command(&a),
        Command::Simulate(a) => simulate::command(&a),
        Command::Plan(a) => plan::command(&a),
        Command::Validate(a) => plan::validate_command(&a),
    }
}

/// Thread pool with `jobs` workers (all cores when absent).
pub(crate) fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    if jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(CliError::usage)
}

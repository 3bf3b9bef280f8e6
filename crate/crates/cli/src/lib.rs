//! Command-line front end for `spdc-g2`: scenario documents, runs and
//! sweeps with CSV/JSON reports, and the built-in verification suite.

pub mod error;
pub mod output;
pub mod run;
pub mod scenario;
pub mod selftest;

pub use error::{CliError, Result};
pub use run::{run, Report, RunOptions};
pub use scenario::{parse_scenario, parse_scenario_with, Overrides, Scenario};

use std::path::Path;

/// Reads, validates and runs the scenario file at `path`.
pub fn run_file(path: &Path, out: &Path, overrides: Overrides, options: RunOptions) -> Result<Report> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let scenario = parse_scenario_with(&text, overrides)?;
    run(&scenario, out, options)
}

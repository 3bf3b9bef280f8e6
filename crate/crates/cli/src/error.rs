use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// Position of a problem in the scenario document, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed document, schema violation or invariant violation.
    #[error("{}", scenario_message(.location, .message))]
    Scenario {
        location: Option<Location>,
        message: String,
        source: Option<spdc_g2::Error>,
    },

    /// Failure while computing a scenario that passed validation.
    #[error("{context}: {source}")]
    Compute {
        context: String,
        source: spdc_g2::Error,
    },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Other(String),
}

fn scenario_message(location: &Option<Location>, message: &str) -> String {
    match location {
        Some(loc) => format!("scenario error at {loc}: {message}"),
        None => format!("scenario error: {message}"),
    }
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for scenario problems, 3 for grid and
    /// modulator preconditions, 4 for I/O, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        let core = match self {
            CliError::Scenario { source, .. } => source.as_ref(),
            CliError::Compute { source, .. } => Some(source),
            CliError::Io { .. } => return 4,
            CliError::Other(_) => return 1,
        };
        match core {
            Some(
                spdc_g2::Error::AliasRisk { .. }
                | spdc_g2::Error::NarrowbandInvalid { .. }
                | spdc_g2::Error::GridIncommensurate { .. },
            ) => 3,
            _ if matches!(self, CliError::Scenario { .. }) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

//! Library side of the `qcorr` command line: scenario parsing, report
//! rendering, and the runner, kept as a library so integration tests can
//! drive everything in-process.

use std::fmt;

pub mod report;
pub mod runner;
pub mod scenario;

/// Process exit codes: 0 success, 1 operational/validation error, 2 a
/// checked property failed numerically.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    /// Malformed scenario file, with position information.
    Parse(String),
    /// Structurally valid file failing validation; names the field.
    Validation(String),
    Io(std::io::Error),
    Core(qcorr_core::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "parse error: {msg}"),
            CliError::Validation(msg) => write!(f, "validation error: {msg}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qcorr_core::Error> for CliError {
    fn from(e: qcorr_core::Error) -> Self {
        CliError::Core(e)
    }
}

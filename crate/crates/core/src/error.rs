//! Crate-wide error type.
//!
//! Variants map onto the process exit codes of the `pllid` binary: config and
//! CSV parse problems exit 2, numerical failures (divergence, non-finite
//! data) exit 3, degenerate fits exit 4.

use std::fmt;

/// All failure modes of the toolkit.
#[derive(Debug)]
pub enum Error {
    /// Configuration file missing, unreadable, or malformed.
    Config {
        file: String,
        message: String,
    },
    /// CSV input unreadable or malformed; `row` is 1-based and counts data
    /// rows (the header is row 0).
    Csv {
        file: String,
        row: Option<usize>,
        message: String,
    },
    /// Precondition violation on an operation argument.
    Invalid(String),
    /// Numerical failure: divergence, non-finite intermediate, empty result
    /// where data was required.
    Numerical(String),
    /// A fit whose regressor system is rank deficient or too small to solve.
    Degenerate(String),
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config { file, message } => write!(f, "config {file}: {message}"),
            Error::Csv { file, row: Some(r), message } => {
                write!(f, "csv {file}: row {r}: {message}")
            }
            Error::Csv { file, row: None, message } => write!(f, "csv {file}: {message}"),
            Error::Invalid(m) => write!(f, "invalid argument: {m}"),
            Error::Numerical(m) => write!(f, "numerical failure: {m}"),
            Error::Degenerate(m) => write!(f, "degenerate fit: {m}"),
            Error::Io(e) => write!(f, "io: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Csv { .. } | Error::Invalid(_) | Error::Io(_) => 2,
            Error::Numerical(_) => 3,
            Error::Degenerate(_) => 4,
        }
    }
}

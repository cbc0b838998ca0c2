use std::fmt;

use thermovqa::Error;

/// Failure of a command, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag values.
    Usage(String),
    /// Unreadable, unwritable or malformed files.
    Input(String),
    /// The request exceeds what the dense simulator can hold.
    Capacity(String),
    /// A computed result contradicts a checked invariant.
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Capacity(_) => 4,
            CliError::Invariant(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Capacity(m) => write!(f, "capacity error: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violated: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidArgument(_) => CliError::Usage(msg),
            Error::Capacity { .. } => CliError::Capacity(msg),
            Error::Invariant(_) => CliError::Invariant(msg),
            Error::Domain(_) | Error::Io(_) | Error::Csv(_) | Error::Json(_) => CliError::Input(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

use std::fmt;

use spikescope::Error;

/// Errors grouped by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or manifest (exit 2).
    Usage(String),
    /// Unreadable, malformed or unwritable data (exit 3).
    Data(String),
    /// A numerical failure such as divergence or a singular fit (exit 4).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    /// Prefixes the message with the pipeline stage that failed.
    pub fn at_stage(self, stage: &str) -> Self {
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{stage}: {m}")),
            CliError::Data(m) => CliError::Data(format!("{stage}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{stage}: {m}")),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidArgument(_) => CliError::Usage(msg),
            Error::NonFinite { .. } | Error::Undefined(_) | Error::Singular(_) | Error::Diverged { .. } => {
                CliError::Numerical(msg)
            }
            _ => CliError::Data(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

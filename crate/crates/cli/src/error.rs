use std::fmt;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid scenario; the message names the key.
    Config(String),
    /// Blow-up or escape during a run; the message names module and time.
    Numerical(String),
    /// Filesystem trouble.
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<gselab::Error> for CliError {
    fn from(e: gselab::Error) -> Self {
        use gselab::Error::*;
        match e {
            NumericalFailure { .. } | StepUnderflow { .. } | Escape { .. } | NonFinite { .. } | ZeroState => {
                CliError::Numerical(e.to_string())
            }
            Io(io) => CliError::Io(io),
            other => CliError::Config(other.to_string()),
        }
    }
}

use std::fmt;

/// CLI failure, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid config: exit 2.
    Config(String),
    /// Model domain or feasibility failure: exit 3.
    Domain(String),
    /// Statistical gate failed: exit 4.
    Gate(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Gate(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Domain(m) => write!(f, "domain error: {m}"),
            CliError::Gate(m) => write!(f, "statistical gate failed: {m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<hybridflow::Error> for CliError {
    fn from(e: hybridflow::Error) -> Self {
        match e {
            hybridflow::Error::InvalidParameter { .. } => CliError::Config(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

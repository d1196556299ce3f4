use std::fmt;

/// Failure categories, each with a fixed process exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Infeasible(String),
    NotConverged(String),
    Metrics(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::NotConverged(_) => 4,
            CliError::Metrics(_) => 5,
            CliError::Io(_) => 1,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible synthesis: {m}"),
            CliError::NotConverged(m) => write!(f, "fit did not converge: {m}"),
            CliError::Metrics(m) => write!(f, "metrics failed: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<dsrfilter::Error> for CliError {
    fn from(e: dsrfilter::Error) -> Self {
        match e {
            dsrfilter::Error::Metrics(m) => CliError::Metrics(m),
            dsrfilter::Error::Usage(m) | dsrfilter::Error::Domain(m) => CliError::Config(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

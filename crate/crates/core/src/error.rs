use thiserror::Error;

/// Errors raised by the network, synthesis, fitting and file-format code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation (non-finite value,
    /// non-positive frequency, bad ordering, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller violated an API precondition (empty cascade, mismatched
    /// reference impedances, initial point outside bounds, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// ABCD to S conversion hit a zero denominator.
    #[error("singular ABCD to S conversion (A + B/Z0 + C*Z0 + D = 0)")]
    SingularConversion,

    /// S to ABCD conversion requires a non-zero S21.
    #[error("S-parameters are not invertible to ABCD (S21 = 0)")]
    NonInvertible,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Scalar metric extraction failed (for instance the passband is not
    /// bracketed by the sweep).
    #[error("metrics error: {0}")]
    Metrics(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

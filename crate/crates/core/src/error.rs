use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The exhaustive decoder would have to enumerate more candidates than allowed.
    #[error("enumeration of {candidates} candidates exceeds the cap of {cap}")]
    EnumerationCap { candidates: f64, cap: u64 },

    /// No parameter value in the searched range satisfies the requested target.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Inconsistent code / outer-code / experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of a numeric kernel.
    #[error("{function}: argument {value} outside domain ({expected})")]
    Domain {
        function: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// Inconsistent or invalid configuration.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A precondition on the input data was not met.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A numerical procedure failed to reach its tolerance.
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

use thiserror::Error;

/// Errors raised by the simulation kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter or grid violates its contract.
    #[error("configuration error: {0}")]
    Config(String),
    /// The state stopped being finite during time stepping.
    #[error("integration error: {0}")]
    Integration(String),
    /// A diagnostic was asked for something outside its domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Energy tuning could not bracket the requested target.
    #[error("energy target {target} unreachable: achieved range [{min}, {max}]")]
    UnreachableTarget { target: f64, min: f64, max: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by the scheduling engine and its tooling.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Invalid parameters such as a non-integral `1/ε`.
    #[error("configuration error: {0}")]
    Config(String),
    /// A value outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed user input.
    #[error("input error: {0}")]
    Input(String),
    /// A trace line could not be parsed or validated.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// Removal of a job that is not present.
    #[error("no such job: {0}")]
    NoSuchJob(String),
    /// A size or enumeration guard was exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// A caller violated a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The blue assignment has no machine to place jobs on.
    #[error("infeasible: {0}")]
    Infeasible(String),
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

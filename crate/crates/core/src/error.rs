use thiserror::Error;

/// Errors produced by the simulation library and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// An asymptotic precondition (small-noise regime) does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The adaptive ODE solver could not meet its tolerance.
    #[error("integration failed: {0}")]
    Integration(String),

    /// Censored exit records were handed to an estimator that needs exact times.
    #[error("{0} censored record(s) present; extend t_max or filter before testing")]
    Censored(usize),

    /// Not enough samples for the requested statistic.
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// Configuration problems, all of them at once.
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

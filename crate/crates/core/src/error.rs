use thiserror::Error;

/// Errors raised by the bound evaluators, solvers and simulators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied argument violates a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Bracket expansion never reached the threshold.
    #[error("no crossing: bound stays below {delta} up to t = {t_max:e} after {doublings} doublings")]
    NoCrossing { delta: f64, t_max: f64, doublings: usize },

    /// A numerical self-check failed (transform residue, norm drift, ...).
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// An adaptive quadrature did not reach its tolerance within the node budget.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    /// An iterative solver did not converge within its iteration budget.
    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),
    /// A geometric routine was handed a point it cannot evaluate at.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    /// A log-space accumulation produced a non-finite value.
    #[error("overflow guard: {0}")]
    OverflowGuard(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

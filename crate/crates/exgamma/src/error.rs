//! Library-wide error type.

use crate::specfn::SpecFnError;

/// Errors produced by distribution operations, fitting, and goodness-of-fit.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A distribution or model parameter violated its constraint.
    #[error("invalid parameter: {0}")]
    InvalidParam(&'static str),
    /// A function argument lay outside the supported domain.
    #[error("argument out of domain: {0}")]
    Domain(&'static str),
    /// A special-function kernel failed (domain or convergence).
    #[error(transparent)]
    SpecFn(#[from] SpecFnError),
    /// The survival function underflowed to zero, so a hazard ratio cannot be
    /// formed at that point.
    #[error("survival underflowed to zero; hazard is not representable that deep in the tail")]
    TailUnderflow,
    /// The data admit no meaningful fit (e.g. zero sample variance).
    #[error("degenerate data: {0}")]
    Degenerate(&'static str),
}

//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by samplers, solvers and experiments.
///
/// Two broad classes matter for callers: invalid input parameters
/// (rejected before any computation) and numerical guard failures
/// (detected mid-computation). The CLI maps them to exit codes 1 and 2.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates a precondition (m <= n, nonpositive dof, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The scaling center lies outside the bulk of the spectrum.
    #[error("center outside bulk: {0}")]
    OutsideBulk(String),

    /// An input value is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A single phase-evolution step moved an angle by pi or more.
    #[error("step too large at index {ell}: |delta phi| = {delta:.6} >= pi")]
    StepTooLarge { ell: usize, delta: f64 },

    /// SDE integration failed after the allowed step-size halvings.
    #[error("sde step failure: {0}")]
    SdeStepFailure(String),

    /// A monotonicity or consistency check failed during evaluation.
    #[error("numerical guard: {0}")]
    NumericalGuard(String),

    /// I/O failure while reading or writing files.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the error is a bad-input condition rather than a
    /// numerical failure. Used by the CLI for exit-code selection.
    pub fn is_parameter_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::OutsideBulk(_) | Error::Domain(_) | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

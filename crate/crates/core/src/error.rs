use thiserror::Error;

use crate::model::ModelKind;

/// Errors raised by the model, solver and verification routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A value lies outside the domain of the operation (non-positive
    /// variance, boundary angle, invalid parameter).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("operation `{op}` is not defined for the {kind} model")]
    UnsupportedModel { op: &'static str, kind: ModelKind },

    /// The step size underflowed or the step budget was exhausted.
    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, last_good: Vec<f64>, reason: String },

    /// Repeated steps tried to push a variance through zero.
    #[error("singularity: a variance would cross zero near t = {t}")]
    Singularity { t: f64, last_good: Vec<f64> },

    /// The invariant is below the minimum of the angular potential.
    #[error("no real motion: invariant {invariant} is below the potential minimum {minimum}")]
    NoMotion { invariant: f64, minimum: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

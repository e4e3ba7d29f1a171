use thiserror::Error;

/// Errors raised by the spectral model, the condition checkers and the integrators.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("state has {got} coefficients, expected {expected}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("backward flow requested on a state with components in the stable part (mode {mode})")]
    IllPosedBackwardFlow { mode: usize },

    #[error("operation needs a spatial realization but the eigensystem is abstract")]
    UnsupportedRealization,

    #[error("hypothesis E4 violated at x = {x}: {reason}")]
    HypothesisE4Violated { x: f64, reason: String },

    #[error("insufficient metadata: {0}")]
    InsufficientMetadata(String),

    #[error("condition not verified: {0}")]
    ConditionNotVerified(String),

    #[error("blow-up detected at t = {t} (norm {norm:e})")]
    BlowUpDetected { t: f64, norm: f64 },

    #[error("inapplicable: {0}")]
    Inapplicable(String),

    #[error("origin is not hyperbolic: lambda + nu = {value} lies within tolerance of eigenvalue {eigenvalue}")]
    NonhyperbolicOrigin { value: f64, eigenvalue: f64 },

    #[error("isolating block verification failed: {reason}")]
    BlockVerificationFailed {
        reason: String,
        /// (sample index, s, derivative) of offending boundary samples.
        witnesses: Vec<(usize, f64, f64)>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error types shared across the estimation, selection, and simulation layers.

use thiserror::Error;

/// Errors raised while constructing data or running kernel estimators.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EstimatorError {
    /// The weighted Gram matrix at time `t` cannot be inverted reliably.
    /// Signals insufficient local variation in the regressors.
    #[error("weighted Gram matrix singular at t={t} (condition estimate {condition_estimate:.3e})")]
    SingularGram { t: usize, condition_estimate: f64 },

    /// Leave-out exclusion removed every observation from the window.
    #[error("estimation window at t={t} is empty after leave-out exclusion")]
    EmptyWindow { t: usize },

    #[error("invalid data: {reason}")]
    InvalidData { reason: String },

    #[error("invalid bandwidth: {reason}")]
    InvalidBandwidth { reason: String },
}

/// Errors raised by bandwidth-selection routines, annotated with the
/// offending grid point(s).
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SelectionError {
    #[error("estimation failed at gamma={gamma}: {source}")]
    AtGamma {
        gamma: f64,
        #[source]
        source: EstimatorError,
    },

    #[error("bootstrap refit failed at (gamma1={gamma1}, gamma2={gamma2}): {source}")]
    AtGammaPair {
        gamma1: f64,
        gamma2: f64,
        #[source]
        source: EstimatorError,
    },

    #[error("invalid gamma grid: {0}")]
    InvalidGrid(String),

    #[error("invalid bootstrap configuration: {0}")]
    InvalidConfig(String),
}

/// Domain errors for the admissible-range algebra.
#[derive(Debug, Clone, Copy, Error, PartialEq)]
pub enum RangeError {
    #[error("smoothness alpha must be positive, got {0}")]
    InvalidAlpha(f64),

    #[error("bandwidth rate gamma must lie in (-1, 0), got {0}")]
    InvalidGamma(f64),
}

/// Errors raised by data-generating-process construction and sampling.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum DgpError {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

/// Errors raised by the closed-form risk calculators.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum TheoryError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Errors raised by the experiment runner.
#[derive(Debug, Error)]
pub enum McError {
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("{failures} replication(s) failed; first failure: {first}")]
    ReplicationFailures { failures: usize, first: String },

    #[error(transparent)]
    Dgp(#[from] DgpError),

    #[error(transparent)]
    Estimator(#[from] EstimatorError),

    #[error(transparent)]
    Selection(#[from] SelectionError),
}

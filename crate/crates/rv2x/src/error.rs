//! Error type shared by every module of the simulator.

use thiserror::Error;

/// Errors raised by configuration loading, numerical routines and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("truncation constant violates the monotonicity condition at x = {x}")]
    MonotonicityCondition { x: f64 },

    #[error("no finite-weight perfect matching exists")]
    InfeasibleMatching,

    #[error("no admissible power for this slot (c_l = {c_l}, c_u = {c_u})")]
    InfeasibleSlot { c_l: f64, c_u: f64 },

    #[error(
        "quadrature did not converge: estimated error {error:e} after {evaluations} evaluations"
    )]
    Quadrature { error: f64, evaluations: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

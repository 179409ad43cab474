use thiserror::Error;

/// Errors raised by the integrators, the parareal driver and the analysis routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite right-hand side at collocation node {node}")]
    NonFiniteRhs { node: usize },

    #[error("Picard iteration did not converge after {iterations} sweeps (last residual {residual:e})")]
    PicardNonConvergence { iterations: usize, residual: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (last update {residual:e})")]
    NewtonNonConvergence { iterations: usize, residual: f64 },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("subinterval {index}: {source}")]
    Subinterval {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{} fine-sweep subinterval(s) failed, first: {}", .0.len(), .0[0])]
    FineSweep(Vec<Error>),

    #[error("parareal did not reach tolerance within {max_k} iterations (last iteration error {last:e})")]
    MaxIterationsExceeded {
        max_k: usize,
        last: f64,
        history: Vec<crate::parareal::ConvergenceRecord>,
    },

    #[error("M*_min search exceeded cap {cap} (last |R| = {last_value:e}, threshold {threshold:e})")]
    MminCapExceeded {
        cap: usize,
        last_value: f64,
        threshold: f64,
    },

    #[error("bracket failure: {0}")]
    Bracket(String),

    #[error("Kepler solver failed: {0}")]
    Kepler(String),

    #[error("invalid problem parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;

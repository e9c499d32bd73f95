use thiserror::Error;

use crate::harness::field_io::FieldIoError;
use crate::harness::HarnessError;
use crate::nls::NlsError;

/// Rejected physical or numerical parameters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("field is not normalized: ‖u‖_L² = {0}")]
    NotNormalized(f64),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("field data has length {got}, expected {expected}")]
    BadLength { got: usize, expected: usize },
    #[error("field contains non-finite values")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("no convergence after {iters} iterations (residual {residual:.3e})")]
    MaxIters { iters: usize, residual: f64 },
    #[error("objective did not increase along the ascent direction (gradient norm {grad_norm:.3e})")]
    NonConcaveStep { grad_norm: f64 },
    #[error("line search failed to decrease the reduced energy (gradient norm {grad_norm:.3e})")]
    LineSearchStall { grad_norm: f64 },
    #[error("iterate left the energy cap: ‖w‖_c = {c_norm:.6e} ≥ c^s = {cap:.6e}")]
    CapViolation { c_norm: f64, cap: f64 },
    #[error("multiplier ω = {omega:.6e} left the spectral gap (−mc², mc²) with mc² = {rest:.6e}")]
    GapViolation { omega: f64, rest: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Crate-wide error.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Nls(#[from] NlsError),
    #[error(transparent)]
    FieldIo(#[from] FieldIoError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

//! c-sweeps towards the nonrelativistic limit, rate and decay fits, field
//! persistence and machine-readable reports.

mod decay;
pub mod field_io;
mod fit;
pub mod report;
mod sweep;

use thiserror::Error;

use crate::error::{ParamError, SolverError};
use crate::nls::NlsError;

pub use decay::{fit_decay, fit_decay_window, Component, DecayFit};
pub use fit::{fit_rate, RateFit};
pub use sweep::{observe, run_sweep, StartMode, SweepConfig, SweepResult, SweepRecord};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("rate fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("rate fit needs positive data, got {value} at c = {c}")]
    NonPositive { c: f64, value: f64 },
    #[error("decay window spans only {e_foldings:.2} e-foldings (need ≥ 4)")]
    TailTooShort { e_foldings: f64 },
    #[error("invalid sweep: {0}")]
    BadSweep(String),
    #[error("{failed} of {total} sweep points failed")]
    SweepFailed { failed: usize, total: usize },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Nls(#[from] NlsError),
    #[error(transparent)]
    FieldIo(#[from] field_io::FieldIoError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

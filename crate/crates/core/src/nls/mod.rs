//! The Schrödinger limit problem.
//!
//! As c → ∞ the upper pair of a Dirac ground state approaches a minimizer of
//! `I^{∞,τ}(f) = (1/2m)‖∇f‖² − τ^ζ (2/p)∫|f|^p` on the unit sphere. Up to SU(2)
//! rotations and translations that minimizer is `(h, 0)` with
//! `h(x) = ν^{1/(p−2)} U_p(√(2mν)|x|)`, where `U_p` is the positive radial
//! solution of `−ΔU + U = U^{p−1}` and ν is fixed by ‖h‖ = 1.

mod flow;
mod model;
mod orbit;
mod radial;
mod su2;

use thiserror::Error;

use crate::error::ParamError;

pub use flow::{limit_energy, nls_ground_flow, FlowOptions, FlowResult};
pub use model::{build_h, default_half_width, interior_max_abs, nse2_residual, LimitModel};
pub use orbit::{orbit_distance, OrbitFit};
pub use radial::{nu_formula, solve_up, solve_up_with, up_mass_from_nu, RadialProfile, ShootingOptions};
pub use su2::{su2_act, SU2Element};

#[derive(Debug, Error)]
pub enum NlsError {
    #[error("shooting bracket [{lo}, {hi}] does not straddle the ground state")]
    NoBracket { lo: f64, hi: f64 },
    #[error("inward and outward radial solutions do not match (mismatch {mismatch:.3e})")]
    NoMatch { mismatch: f64 },
    #[error("radial integration step underflow at r = {r}")]
    Integration { r: f64 },
    #[error("normalized gradient flow did not converge after {iters} iterations (gradient {residual:.3e})")]
    MaxIters { iters: usize, residual: f64 },
    #[error("line search stalled at gradient norm {grad_norm:.3e}")]
    LineSearchStall { grad_norm: f64 },
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

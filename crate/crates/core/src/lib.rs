//! Pseudospectral solver for L²-normalized ground states of the three-dimensional
//! nonlinear Dirac equation
//!
//! ```text
//! 𝒟_c u − |u|^{p−2} u = ω u,    ‖u‖_{L²} = 1,    𝒟_c = −icα·∇ + mc²β,
//! ```
//!
//! together with the tooling needed to study its nonrelativistic limit c → ∞.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`], [`fft`], [`field`]: periodic grids, 3D transforms and sampled fields.
//! * [`spectral`]: Fourier-side algebra of the free Dirac operator (symbols,
//!   spectral projections, Foldy–Wouthuysen transform, energy and Sobolev norms,
//!   scaling maps).
//! * [`functionals`]: the energy functional, its gradient, the Lagrange
//!   multiplier, the Pohozaev residual and constraint-set membership.
//! * [`maxmin`] and [`scf`]: the two-level max–min solver and an independent
//!   self-consistent-field oracle.
//! * [`nls`]: the Schrödinger limit problem (radial profile, frequency, SU(2) orbit).
//! * [`harness`]: c-sweeps, rate fits, decay fits, persistence and reporting.
//! * [`acceptance`]: the verification suites shared by the CLI and the test targets.

pub mod acceptance;
pub mod error;
pub mod fft;
pub mod field;
pub mod functionals;
pub mod grid;
pub mod harness;
pub mod maxmin;
mod ode;
pub mod nls;
pub mod scf;
pub mod spectral;

pub use error::{Error, ParamError, SolverError};
pub use field::{Field, PairField, SpinorField, Spectrum};
pub use functionals::{EnergyBreakdown, ModelConstants};
pub use grid::GridSpec;
pub use harness::{RateFit, SweepRecord};
pub use maxmin::{InnerResult, SolveReport};
pub use nls::{LimitModel, RadialProfile, SU2Element};
pub use spectral::{FwDirection, ScaleVariant, Sign, SpectralContext};

pub use num_complex::Complex64;

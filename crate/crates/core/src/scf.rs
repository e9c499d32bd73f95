//! Self-consistent-field iteration used as an independent cross-check of the
//! max–min solver.
//!
//! Each sweep solves the linearized equation at the current multiplier,
//! `u ← normalize((𝒟_c − (ω_k − s))⁻¹ [τ^ζ |u|^{p−2}u + s·u])`, then refreshes
//! ω by the Rayleigh quotient. Fixed points are exactly the normalized solutions.
//! The shift `s` is switched on when ω sits close to the top of the gap.
//! Without nonlinearity (τ = 0) the sweep is plain inverse iteration at the
//! fixed point `mc² − ½·margin·mc²`, which picks the lowest positive mode.

use crate::error::SolverError;
use crate::field::SpinorField;
use crate::functionals::{multiplier_shifted, nonlinearity};
use crate::maxmin::{IterRecord, SolveReport};
use crate::spectral::SpectralContext;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScfOptions {
    /// Stop when ‖u_{k+1} − u_k‖_{L²} falls below this.
    pub tol: f64,
    pub max_iters: usize,
    /// Relative gap margin (mc² − ω)/mc² below which the shift is used.
    pub shift_margin: f64,
}

impl Default for ScfOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 2000,
            shift_margin: 0.05,
        }
    }
}

pub fn scf_oracle(ctx: &SpectralContext, init: &SpinorField, opts: ScfOptions) -> Result<SolveReport, SolverError> {
    let g = *ctx.grid();
    let mc2 = g.rest_energy();
    let tz = g.tau_zeta();
    let mut u = init.clone().with_grid(g)?.normalized();
    let mut history = Vec::new();

    for iter in 0..=opts.max_iters {
        let om_sh = multiplier_shifted(ctx, &u)?;
        let mut next = if tz == 0.0 {
            ctx.resolvent(&u, -0.5 * opts.shift_margin * mc2)
        } else {
            if om_sh >= 0.0 || om_sh <= -2.0 * mc2 {
                return Err(SolverError::GapViolation { omega: mc2 + om_sh, rest: mc2 });
            }
            let gap = -om_sh;
            let s = if gap / mc2 < opts.shift_margin { 0.5 * gap } else { 0.0 };
            let mut rhs = nonlinearity(&u, g.p).scaled(tz);
            if s > 0.0 {
                rhs.axpy(s, &u);
            }
            ctx.resolvent(&rhs, om_sh - s)
        };
        next.normalize();
        next.align_phase(&u);
        let step = next.sub(&u).norm();
        history.push(IterRecord {
            energy: om_sh,
            grad_norm: step,
        });
        u = next;
        if step <= opts.tol {
            return SolveReport::from_state(ctx, u, history, iter + 1);
        }
        if iter == opts.max_iters {
            return Err(SolverError::MaxIters { iters: iter, residual: step });
        }
    }
    unreachable!("loop returns on convergence or on the iteration cap")
}

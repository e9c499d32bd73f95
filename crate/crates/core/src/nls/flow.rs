use super::NlsError;
use crate::error::ParamError;
use crate::field::PairField;
use crate::functionals::{constants, nonlinear_mass, nonlinearity, NORM_TOL};
use crate::spectral::SpectralContext;

/// `I^{∞,τ}(f) = (1/2m)‖∇f‖² − τ^ζ (2/p)∫|f|^p`.
pub fn limit_energy(ctx: &SpectralContext, f: &PairField, tau: f64) -> f64 {
    let g = ctx.grid();
    let tz = tau_zeta(g.p, tau);
    ctx.gradient_norm_sq(f) / (2.0 * g.mass) - tz * nonlinear_mass(f, g.p)
}

fn tau_zeta(p: f64, tau: f64) -> f64 {
    if tau == 0.0 {
        0.0
    } else {
        tau.powf(constants(p).map(|k| k.zeta).unwrap_or(5.0 - 1.5 * p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    /// Stop when the tangent gradient falls below this in L².
    pub tol: f64,
    pub max_iters: usize,
    pub tau: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iters: 5000,
            tau: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub state: PairField,
    pub energy: f64,
    /// ν = −½ Re⟨G, f⟩ with G the L² gradient of I^{∞,τ}.
    pub nu: f64,
    pub iters: usize,
    pub history: Vec<f64>,
}

/// Normalized, preconditioned gradient descent for I^{∞,τ} on the unit sphere.
pub fn nls_ground_flow(ctx: &SpectralContext, init: &PairField, opts: FlowOptions) -> Result<FlowResult, NlsError> {
    let g = *ctx.grid();
    let norm = init.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(ParamError::NotNormalized(norm).into());
    }
    let tz = tau_zeta(g.p, opts.tau);
    let mut f = init.clone().with_grid(g)?;
    let mut energy = limit_energy(ctx, &f, opts.tau);
    let mut history = vec![energy];

    for iter in 0..=opts.max_iters {
        let mut grad = ctx.laplacian(&f).scaled(-1.0 / g.mass);
        grad.axpy(-2.0 * tz, &nonlinearity(&f, g.p));
        let nu = -0.5 * grad.re_inner(&f);
        grad.axpy(2.0 * nu, &f);
        let grad_norm = grad.norm();
        if grad_norm <= opts.tol {
            return Ok(FlowResult {
                state: f,
                energy,
                nu,
                iters: iter,
                history,
            });
        }
        if iter == opts.max_iters {
            return Err(NlsError::MaxIters {
                iters: iter,
                residual: grad_norm,
            });
        }
        let shift = 2.0 * nu.max(1e-3);
        let spec = ctx.map_scalar(&ctx.forward(&grad), |m| -1.0 / (m.xi2 / g.mass + shift));
        let mut dir = ctx.inverse(spec);
        let along = f.re_inner(&dir);
        dir.axpy(-along, &f);
        let slope = grad.re_inner(&dir);

        let mut t = 1.0;
        loop {
            let mut trial = f.clone();
            trial.axpy(t, &dir);
            trial.normalize();
            let e = limit_energy(ctx, &trial, opts.tau);
            if e <= energy + 1e-4 * t * slope {
                f = trial;
                energy = e;
                history.push(e);
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                // below ~10·tol the Armijo decrease is under energy round-off
                if grad_norm <= 10.0 * opts.tol {
                    return Ok(FlowResult {
                        state: f,
                        energy,
                        nu,
                        iters: iter,
                        history,
                    });
                }
                return Err(NlsError::LineSearchStall { grad_norm });
            }
        }
    }
    unreachable!("loop returns on convergence or on the iteration cap")
}

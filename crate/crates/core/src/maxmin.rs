//! Two-level max–min scheme for the constrained ground state.
//!
//! *Inner problem.* For `w ∈ E_c⁺` with ‖w‖ = 1 the functional is maximized over
//! `S_W = {u : ‖u‖_{L²} = 1, u⁺ ∈ span{w}}`. Points of `S_W` are stored as
//! `u = a·w + η` with `η ∈ E_c⁻` and `a = √(1 − ‖η‖²) > 0`, which also fixes the
//! global phase (⟨w, u⁺⟩ real and positive).
//!
//! *Outer problem.* The reduced energy `ℰ(w) = max_{S_W} I` is minimized over the
//! unit sphere of `E_c⁺`. Its gradient comes from the envelope identity
//! `dℰ(w)[δw] = a·Re⟨G(φ(w)), δw⟩` for tangent `δw ∈ E_c⁺`.
//!
//! Both levels are preconditioned Riemannian line searches with Armijo
//! backtracking (parameter 1e−4, shrink 0.5). Energies are compared in
//! rest-subtracted form so the acceptance tests stay meaningful for large c.

use num_complex::Complex64;

use crate::error::SolverError;
use crate::field::{PairField, SpinorField, Spectrum};
use crate::functionals::{self, in_constraint_set, nonlinear_mass, nonlinearity, Membership, NORM_TOL};
use crate::spectral::{FwDirection, Sign, SpectralContext};

const ARMIJO: f64 = 1e-4;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerOptions {
    /// Stop when the projected-gradient norm drops below this (energy units).
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for InnerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iters: 500,
        }
    }
}

/// The maximizer φ(w) of the functional on `S_W`.
#[derive(Debug, Clone)]
pub struct InnerResult {
    pub u_star: SpinorField,
    /// Negative-energy part η = P_c⁻ u_star.
    pub eta: SpinorField,
    /// a = ⟨w, u_star⁺⟩ > 0.
    pub amplitude: f64,
    pub value: f64,
    pub value_shifted: f64,
    pub omega: f64,
    pub omega_shifted: f64,
    pub grad_norm: f64,
    pub iters: usize,
    /// Rest-subtracted objective after every accepted step, starting point included.
    pub history: Vec<f64>,
}

struct InnerPoint {
    eta: SpinorField,
    eta_hat: Spectrum<4>,
    a: f64,
    u: SpinorField,
    value_shifted: f64,
}

struct Target<'a> {
    ctx: &'a SpectralContext,
    w: &'a SpinorField,
    /// ‖w‖_c² − mc²
    w_kin: f64,
}

impl Target<'_> {
    fn point(&self, eta: SpinorField, eta_hat: Spectrum<4>) -> Option<InnerPoint> {
        let g = self.ctx.grid();
        let eta_mass = eta_hat.norm_sq();
        if eta_mass >= 1.0 {
            return None;
        }
        let a = (1.0 - eta_mass).sqrt();
        let mut u = eta.clone();
        u.axpy(a, self.w);
        let eta_kin = self.ctx.c_norm_sq_shifted_spectrum(&eta_hat);
        let value_shifted = a * a * self.w_kin
            - (eta_kin + 2.0 * g.rest_energy() * eta_mass)
            - g.tau_zeta() * nonlinear_mass(&u, g.p);
        Some(InnerPoint {
            eta,
            eta_hat,
            a,
            u,
            value_shifted,
        })
    }
}

fn slack(value: f64) -> f64 {
    1e-13 * (1.0 + value.abs())
}

fn inner_core(
    ctx: &SpectralContext,
    w: &SpinorField,
    start: Option<&SpinorField>,
    opts: InnerOptions,
) -> Result<InnerResult, SolverError> {
    let g = *ctx.grid();
    let mc2 = g.rest_energy();
    let tz = g.tau_zeta();
    let w_hat = ctx.forward(w);
    let target = Target {
        ctx,
        w,
        w_kin: ctx.c_norm_sq_shifted_spectrum(&w_hat),
    };

    let (eta0, eta0_hat) = match start {
        Some(s) => {
            let hat = ctx.project_spectrum(&ctx.forward(s), Sign::Minus);
            (ctx.inverse(hat.clone()), hat)
        }
        None => (SpinorField::zeros(g), Spectrum::zeros(g)),
    };
    let mut cur = target
        .point(eta0, eta0_hat)
        .ok_or_else(|| SolverError::Precondition("starting point has ‖η‖_{L²} ≥ 1".into()))?;
    let mut history = vec![cur.value_shifted];

    for iter in 0..=opts.max_iters {
        let nl = nonlinearity(&cur.u, g.p);
        let nl_hat = ctx.forward(&nl);
        let om_sh = target.w_kin - tz * nl_hat.re_inner(&w_hat) / cur.a;
        let omega_t = mc2 + om_sh;
        // projected gradient on E⁻: −2(|𝒟_c| + ω̃)η − 2τ^ζ P⁻N(u)
        let grad_hat = {
            let eta_hat = &cur.eta_hat;
            let mut pn = ctx.project_spectrum(&nl_hat, Sign::Minus).scaled(-2.0 * tz);
            let damp = ctx.map_scalar(eta_hat, |m| -2.0 * (m.lambda + omega_t));
            pn.axpy(1.0, &damp);
            pn
        };
        let grad_norm = grad_hat.norm_sq().sqrt();
        if grad_norm <= opts.tol {
            let u_star = cur.u;
            let omega_shifted = functionals::multiplier_shifted(ctx, &u_star)?;
            return Ok(InnerResult {
                eta: cur.eta,
                amplitude: cur.a,
                value: mc2 + cur.value_shifted,
                value_shifted: cur.value_shifted,
                omega: mc2 + omega_shifted,
                omega_shifted,
                grad_norm,
                iters: iter,
                history,
                u_star,
            });
        }
        if iter == opts.max_iters {
            return Err(SolverError::MaxIters {
                iters: iter,
                residual: grad_norm,
            });
        }
        let floor = omega_t.max(0.0);
        let dir_hat = ctx.map_scalar(&grad_hat, |m| 0.5 / (m.lambda + floor));
        let slope = grad_hat.re_inner(&dir_hat);
        let dir = ctx.inverse(dir_hat.clone());

        let mut t = 1.0;
        loop {
            let mut eta = cur.eta.clone();
            eta.axpy(t, &dir);
            let mut eta_hat = cur.eta_hat.clone();
            eta_hat.axpy(t, &dir_hat);
            if let Some(next) = target.point(eta, eta_hat) {
                if next.value_shifted >= cur.value_shifted + ARMIJO * t * slope - slack(cur.value_shifted) {
                    cur = next;
                    history.push(cur.value_shifted);
                    break;
                }
            }
            t *= SHRINK;
            if t < 1e-12 {
                return Err(SolverError::NonConcaveStep { grad_norm });
            }
        }
    }
    unreachable!("loop returns on convergence or on the iteration cap")
}

fn check_positive_unit(ctx: &SpectralContext, w: &SpinorField) -> Result<(), SolverError> {
    let n = w.norm();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(SolverError::Precondition(format!("‖w‖_L² = {n} ≠ 1")));
    }
    let neg = ctx.project(w, Sign::Minus).norm();
    if neg > 1e-10 {
        return Err(SolverError::Precondition(format!("‖P⁻w‖ = {neg:.3e}, w must lie in E_c⁺")));
    }
    Ok(())
}

fn check_cap(ctx: &SpectralContext, w: &SpinorField) -> Result<(), SolverError> {
    let chk = in_constraint_set(ctx, w);
    match chk.membership {
        Membership::OutsideEnergy => Err(SolverError::CapViolation {
            c_norm: chk.c_norm,
            cap: chk.cap.unwrap_or(f64::INFINITY),
        }),
        Membership::OutsideMass | Membership::Undefined => {
            Err(SolverError::Precondition(format!("infeasible start: {:?}", chk.membership)))
        }
        _ => Ok(()),
    }
}

/// Maximizes the functional over `S_W` starting from `u = a·w + P⁻(start)`.
pub fn inner_maximize(
    ctx: &SpectralContext,
    w: &SpinorField,
    start: Option<&SpinorField>,
    opts: InnerOptions,
) -> Result<InnerResult, SolverError> {
    check_positive_unit(ctx, w)?;
    check_cap(ctx, w)?;
    inner_core(ctx, w, start, opts)
}

/// ℰ(w) = I(φ(w)).
pub fn reduced_energy(ctx: &SpectralContext, w: &SpinorField, tol: f64) -> Result<f64, SolverError> {
    Ok(inner_maximize(ctx, w, None, InnerOptions { tol, ..Default::default() })?.value)
}

/// Riemannian gradient of ℰ at `w` on the unit sphere of `E_c⁺`, given the inner maximizer.
pub fn reduced_gradient(ctx: &SpectralContext, w: &SpinorField, inner: &InnerResult) -> SpinorField {
    let w_hat = ctx.forward(w);
    ctx.inverse(reduced_gradient_spectrum(ctx, &w_hat, inner))
}

fn reduced_gradient_spectrum(ctx: &SpectralContext, w_hat: &Spectrum<4>, inner: &InnerResult) -> Spectrum<4> {
    let g = ctx.grid();
    let a = inner.amplitude;
    let nl_hat = ctx.forward(&nonlinearity(&inner.u_star, g.p));
    // P⁺G with the w-parallel rest energy dropped; it cancels in the tangent projection.
    let mut q = ctx.project_spectrum(&nl_hat, Sign::Plus).scaled(-2.0 * g.tau_zeta());
    q.axpy(1.0, &ctx.map_scalar(w_hat, |m| 2.0 * a * m.kin));
    let along = w_hat.re_inner(&q);
    q.axpy(-along, w_hat);
    q.scaled(a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterOptions {
    pub tol_outer: f64,
    pub tol_inner: f64,
    pub max_iters: usize,
    pub inner_max_iters: usize,
}

impl Default for OuterOptions {
    fn default() -> Self {
        Self {
            tol_outer: 1e-7,
            tol_inner: 1e-9,
            max_iters: 1000,
            inner_max_iters: 500,
        }
    }
}

/// Starting point of the outer descent.
#[derive(Debug, Clone)]
pub enum OuterInit {
    Field(SpinorField),
    /// `U_FW⁻¹ (f, 0)`: a Pauli wave function lifted into E_c⁺.
    FwEmbedded(PairField),
    /// FW embedding of a spin-up Gaussian `exp(−|x|²/(2 width²))`.
    FwGaussian { width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    /// Rest-subtracted energy at the iterate.
    pub energy: f64,
    pub grad_norm: f64,
}

/// Converged state of either solver.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub ground_state: SpinorField,
    pub omega: f64,
    /// ω − mc²
    pub omega_shifted: f64,
    pub energy: f64,
    /// I(u) − mc²
    pub energy_shifted: f64,
    pub el_residual: f64,
    pub pohozaev: f64,
    pub history: Vec<IterRecord>,
    pub iters: usize,
}

impl SolveReport {
    /// mc² − ω.
    pub fn gap(&self) -> f64 {
        -self.omega_shifted
    }

    pub(crate) fn from_state(ctx: &SpectralContext, u: SpinorField, history: Vec<IterRecord>, iters: usize) -> Result<Self, SolverError> {
        let mc2 = ctx.grid().rest_energy();
        let omega_shifted = functionals::multiplier_shifted(ctx, &u)?;
        let energy_shifted = functionals::energy(ctx, &u).rest_subtracted;
        Ok(Self {
            omega: mc2 + omega_shifted,
            omega_shifted,
            energy: mc2 + energy_shifted,
            energy_shifted,
            el_residual: functionals::el_residual(ctx, &u, omega_shifted),
            pohozaev: functionals::pohozaev_residual(ctx, &u),
            ground_state: u,
            history,
            iters,
        })
    }
}

/// `U_FW⁻¹ (f, 0)`, normalized; lies in E_c⁺ because U_FW diagonalizes 𝒟_c.
pub fn fw_embed(ctx: &SpectralContext, f: &PairField) -> SpinorField {
    let lower = PairField::zeros(*f.grid());
    let spinor = SpinorField::from_pairs(f, &lower).expect("pairs share the mesh");
    ctx.fw_transform(&spinor, FwDirection::Inverse).normalized()
}

pub fn gaussian_pair(ctx: &SpectralContext, width: f64) -> PairField {
    PairField::from_fn(*ctx.grid(), |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        [Complex64::new((-0.5 * r2 / (width * width)).exp(), 0.0), Complex64::new(0.0, 0.0)]
    })
}

fn initial_state(ctx: &SpectralContext, init: OuterInit) -> SpinorField {
    match init {
        OuterInit::Field(u) => ctx.project(&u.with_grid(*ctx.grid()).expect("init on solver mesh"), Sign::Plus).normalized(),
        OuterInit::FwEmbedded(f) => fw_embed(ctx, &f),
        OuterInit::FwGaussian { width } => fw_embed(ctx, &gaussian_pair(ctx, width)),
    }
}

/// Minimizes the reduced energy over the unit sphere of E_c⁺.
pub fn outer_minimize(ctx: &SpectralContext, init: OuterInit, opts: OuterOptions) -> Result<SolveReport, SolverError> {
    let inner_opts = InnerOptions {
        tol: opts.tol_inner,
        max_iters: opts.inner_max_iters,
    };
    let mut w = initial_state(ctx, init);
    check_cap(ctx, &w)?;
    let mut inner = inner_core(ctx, &w, None, inner_opts)?;
    let mut history = Vec::new();

    for iter in 0..=opts.max_iters {
        let w_hat = ctx.forward(&w);
        let grad_hat = reduced_gradient_spectrum(ctx, &w_hat, &inner);
        let grad_norm = grad_hat.norm_sq().sqrt();
        history.push(IterRecord {
            energy: inner.value_shifted,
            grad_norm,
        });
        if grad_norm <= opts.tol_outer {
            return SolveReport::from_state(ctx, inner.u_star, history, iter);
        }
        if iter == opts.max_iters {
            return Err(SolverError::MaxIters {
                iters: iter,
                residual: grad_norm,
            });
        }

        let shift = (-inner.omega_shifted).max(1e-3 * ctx.grid().mass);
        let mut dir_hat = ctx.map_scalar(&grad_hat, |m| -0.5 / (m.kin + shift));
        let along = w_hat.re_inner(&dir_hat);
        dir_hat.axpy(-along, &w_hat);
        let slope = grad_hat.re_inner(&dir_hat);

        let mut t = 1.0;
        loop {
            let mut trial_hat = w_hat.clone();
            trial_hat.axpy(t, &dir_hat);
            let trial_hat = ctx.project_spectrum(&trial_hat, Sign::Plus);
            let trial = ctx.inverse(trial_hat).normalized();
            check_cap(ctx, &trial)?;
            let next = inner_core(ctx, &trial, Some(&inner.eta), inner_opts)?;
            if next.value_shifted <= inner.value_shifted + ARMIJO * t * slope + slack(inner.value_shifted) {
                w = trial;
                inner = next;
                break;
            }
            t *= SHRINK;
            if t < 1e-10 {
                if grad_norm <= 10.0 * opts.tol_outer {
                    return SolveReport::from_state(ctx, inner.u_star, history, iter);
                }
                return Err(SolverError::LineSearchStall { grad_norm });
            }
        }
    }
    unreachable!("loop returns on convergence or on the iteration cap")
}

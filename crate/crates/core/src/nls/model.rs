use num_complex::Complex64;

use super::flow::limit_energy;
use super::radial::{nu_formula, RadialProfile};
use super::NlsError;
use crate::error::ParamError;
use crate::field::{Field, PairField, SpinorField};
use crate::functionals::nonlinearity;
use crate::grid::GridSpec;
use crate::spectral::SpectralContext;

/// ν, the normalized profile h sampled on a grid, and e_∞(1).
#[derive(Debug, Clone)]
pub struct LimitModel {
    pub p: f64,
    pub m: f64,
    pub nu: f64,
    /// √(2mν), the decay rate of h.
    pub kappa: f64,
    /// (h, 0)
    pub h: PairField,
    /// I^{∞,1}(h, 0)
    pub e_inf: f64,
}

impl LimitModel {
    /// e_∞(τ) = τ² e_∞(1).
    pub fn e_inf_at(&self, tau: f64) -> f64 {
        tau * tau * self.e_inf
    }

    pub fn h_values(&self) -> &[Complex64] {
        self.h.component(0)
    }

    /// (h, 0, 0, 0)
    pub fn h_spinor(&self) -> SpinorField {
        let lower = PairField::zeros(*self.h.grid());
        SpinorField::from_pairs(&self.h, &lower).expect("same mesh")
    }

    /// Mesh on which h is sampled.
    pub fn grid(&self) -> &GridSpec {
        self.h.grid()
    }
}

/// Box half-width spanning 12 decay lengths of h.
pub fn default_half_width(nu: f64, m: f64) -> f64 {
    12.0 / (2.0 * m * nu).sqrt()
}

pub fn build_h(profile: &RadialProfile, ctx: &SpectralContext) -> Result<LimitModel, NlsError> {
    let g = *ctx.grid();
    if (profile.p - g.p).abs() > 1e-14 {
        return Err(ParamError::GridMismatch(format!("profile has p = {}, grid has p = {}", profile.p, g.p)).into());
    }
    let (p, m) = (g.p, g.mass);
    let nu = nu_formula(p, m, profile.mass_l2)?;
    let kappa = (2.0 * m * nu).sqrt();
    let amp = nu.powf(1.0 / (p - 2.0));
    let zero = Complex64::new(0.0, 0.0);
    let h = PairField::from_fn(g, |x| {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        [Complex64::new(amp * profile.eval(kappa * r), 0.0), zero]
    });
    let e_inf = limit_energy(ctx, &h, 1.0);
    Ok(LimitModel { p, m, nu, kappa, h, e_inf })
}

/// Pointwise `−Δf/(2m) + νf − |f|^{p−2}f`.
pub fn nse2_residual<const K: usize>(ctx: &SpectralContext, f: &Field<K>, nu: f64) -> Field<K> {
    let g = ctx.grid();
    let mut r = ctx.laplacian(f).scaled(-0.5 / g.mass);
    r.axpy(nu, f);
    r.axpy(-1.0, &nonlinearity(f, g.p));
    r
}

/// Largest |value| over nodes with every coordinate inside `[−frac·L, frac·L]`.
pub fn interior_max_abs<const K: usize>(f: &Field<K>, frac: f64) -> f64 {
    let g = f.grid();
    let lim = frac * g.half_width;
    let mut worst: f64 = 0.0;
    for k in 0..K {
        for (node, v) in f.component(k).iter().enumerate() {
            let x = g.position(node);
            if x.iter().all(|c| c.abs() <= lim) {
                worst = worst.max(v.norm());
            }
        }
    }
    worst
}

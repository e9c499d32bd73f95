//! The energy functional
//!
//! ```text
//! I^{c,τ}(u) = ‖u⁺‖_c² − ‖u⁻‖_c² − τ^ζ A[u],   A[u] = (2/p) ∫|u|^p,   ζ = 5 − 3p/2,
//! ```
//!
//! its L²-gradient, the Lagrange multiplier, the Pohozaev residual, constraint
//! membership and the τ ↔ c rescaling identity.
//!
//! Gradient convention: `dI(u)[h] = Re⟨G(u), h⟩_{L²}` with
//! `G(u) = 2𝒟_c u − 2τ^ζ |u|^{p−2} u`, so the Euler–Lagrange equation on the unit
//! sphere reads `G(u) = 2ω u`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::field::{Field, SpinorField};
use crate::spectral::{scale_field, sigma_dot, ScaleVariant, Sign, SpectralContext};

/// Normalization tolerance accepted by [`multiplier`].
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    /// ζ = 5 − 3p/2
    pub zeta: f64,
    /// θ = 3ζ/(2 − ζ)
    pub theta: f64,
    /// s = (3p − 7)/(6p − 16), only for p ∈ (8/3, 3).
    pub s_exp: Option<f64>,
}

pub fn constants(p: f64) -> Result<ModelConstants, ParamError> {
    if !(p > 2.0 && p < 3.0) {
        return Err(ParamError::OutOfRange {
            name: "p",
            value: p,
            range: "(2, 3)",
        });
    }
    let zeta = 5.0 - 1.5 * p;
    let theta = 3.0 * zeta / (2.0 - zeta);
    let denom = 6.0 * p - 16.0;
    let s_exp = (denom > 0.0).then(|| (3.0 * p - 7.0) / denom);
    Ok(ModelConstants { zeta, theta, s_exp })
}

/// ∫|u|^p.
pub fn lp_integral<const K: usize>(u: &Field<K>, p: f64) -> f64 {
    let h3 = u.grid().cell_volume();
    u.density().par_iter().map(|r| r.powf(0.5 * p)).sum::<f64>() * h3
}

/// A[u] = (2/p) ∫|u|^p.
pub fn nonlinear_mass<const K: usize>(u: &Field<K>, p: f64) -> f64 {
    2.0 / p * lp_integral(u, p)
}

/// Pointwise |u|^{p−2} u, with |u|^{p−2} := 0 where u = 0.
pub fn nonlinearity<const K: usize>(u: &Field<K>, p: f64) -> Field<K> {
    let rho = u.density();
    let weight: Vec<f64> = rho
        .par_iter()
        .map(|&r| if r > 0.0 { r.powf(0.5 * (p - 2.0)) } else { 0.0 })
        .collect();
    let mut out = u.clone();
    let m = u.grid().nodes();
    out.data_mut().par_chunks_mut(m).for_each(|block| {
        for (v, w) in block.iter_mut().zip(&weight) {
            *v *= *w;
        }
    });
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// ‖u⁺‖_c²
    pub pos: f64,
    /// ‖u⁻‖_c²
    pub neg: f64,
    /// A[u]
    pub nl: f64,
    /// pos − neg − τ^ζ nl
    pub total: f64,
    /// total − mc², evaluated without subtracting two O(mc²) numbers.
    pub rest_subtracted: f64,
}

/// ⟨(𝒟_c − mc²) u, u⟩, i.e. ‖u⁺‖_c² − ‖u⁻‖_c² − mc²‖u‖².
pub fn dirac_form_shifted(ctx: &SpectralContext, u: &SpinorField) -> f64 {
    let s = ctx.forward(u);
    let mc2 = ctx.grid().rest_energy();
    let c = ctx.grid().c;
    ctx.mode_sum(&s, |m, v| {
        let (sb0, sb1) = sigma_dot(&m.xi, v[2], v[3]);
        let cross = (v[0].conj() * sb0 + v[1].conj() * sb1).re;
        -2.0 * mc2 * (v[2].norm_sqr() + v[3].norm_sqr()) + 2.0 * c * cross
    })
}

/// Off-diagonal part ⟨c α·(−i∇) u, u⟩ = ⟨(𝒟_c − mc²β) u, u⟩.
fn kinetic_form(ctx: &SpectralContext, u: &SpinorField) -> f64 {
    let s = ctx.forward(u);
    let c = ctx.grid().c;
    ctx.mode_sum(&s, |m, v| {
        let (sb0, sb1) = sigma_dot(&m.xi, v[2], v[3]);
        2.0 * c * (v[0].conj() * sb0 + v[1].conj() * sb1).re
    })
}

pub fn energy(ctx: &SpectralContext, u: &SpinorField) -> EnergyBreakdown {
    let g = ctx.grid();
    let s = ctx.forward(u);
    let (pos, neg) = {
        let pos = ctx.mode_sum(&s, |m, v| m.lambda * crate::spectral::norm_sqr(&ctx.project_mode(m, v, Sign::Plus)));
        let neg = ctx.mode_sum(&s, |m, v| m.lambda * crate::spectral::norm_sqr(&ctx.project_mode(m, v, Sign::Minus)));
        (pos, neg)
    };
    let nl = nonlinear_mass(u, g.p);
    let tz = g.tau_zeta();
    let total = pos - neg - tz * nl;
    let rest_subtracted = dirac_form_shifted(ctx, u) + g.rest_energy() * (u.norm_sq() - 1.0) - tz * nl;
    EnergyBreakdown {
        pos,
        neg,
        nl,
        total,
        rest_subtracted,
    }
}

/// G(u) = 2𝒟_c u − 2τ^ζ |u|^{p−2} u.
pub fn l2_gradient(ctx: &SpectralContext, u: &SpinorField) -> SpinorField {
    let g = ctx.grid();
    let du = ctx.apply_dirac(u);
    let nu = nonlinearity(u, g.p);
    SpinorField::lin_comb(2.0, &du, -2.0 * g.tau_zeta(), &nu)
}

/// G(u) − 2mc² u, the gradient with the rest energy removed.
pub fn l2_gradient_shifted(ctx: &SpectralContext, u: &SpinorField) -> SpinorField {
    let g = ctx.grid();
    let du = ctx.apply_dirac_shifted(u);
    let nu = nonlinearity(u, g.p);
    SpinorField::lin_comb(2.0, &du, -2.0 * g.tau_zeta(), &nu)
}

fn check_normalized(u: &SpinorField) -> Result<(), ParamError> {
    let n = u.norm();
    if (n - 1.0).abs() > NORM_TOL {
        Err(ParamError::NotNormalized(n))
    } else {
        Ok(())
    }
}

/// ω(u) − mc², where ω(u) = ½⟨G(u), u⟩ = ⟨𝒟_c u, u⟩ − τ^ζ ∫|u|^p.
pub fn multiplier_shifted(ctx: &SpectralContext, u: &SpinorField) -> Result<f64, ParamError> {
    check_normalized(u)?;
    let g = ctx.grid();
    Ok(dirac_form_shifted(ctx, u) + g.rest_energy() * (u.norm_sq() - 1.0) - g.tau_zeta() * lp_integral(u, g.p))
}

/// The Lagrange multiplier ω(u) = ½ dI(u)[u] of a normalized field.
pub fn multiplier(ctx: &SpectralContext, u: &SpinorField) -> Result<f64, ParamError> {
    Ok(ctx.grid().rest_energy() + multiplier_shifted(ctx, u)?)
}

/// ‖𝒟_c u − τ^ζ|u|^{p−2}u − ω u‖_{L²} with ω = mc² + `omega_shifted`.
pub fn el_residual(ctx: &SpectralContext, u: &SpinorField, omega_shifted: f64) -> f64 {
    let g = l2_gradient_shifted(ctx, u);
    let mut r = g.scaled(0.5);
    r.axpy(-omega_shifted, u);
    r.norm()
}

/// ‖u⁺‖_c² − ‖u⁻‖_c² − ∫⟨mc²βu, u⟩ + ((6 − 3p)/p) τ^ζ ∫|u|^p.
///
/// Vanishes on solutions of `𝒟_c u − τ^ζ|u|^{p−2}u = ω u`. The β term is
/// pointwise, so the difference of the first three terms reduces to the
/// off-diagonal form ⟨cα·(−i∇)u, u⟩.
pub fn pohozaev_residual(ctx: &SpectralContext, u: &SpinorField) -> f64 {
    let g = ctx.grid();
    kinetic_form(ctx, u) + (6.0 - 3.0 * g.p) / g.p * g.tau_zeta() * lp_integral(u, g.p)
}

/// Membership of a field in the constraint sets built from the mass ball
/// ‖u‖_{L²} ≤ 1 and, for p ∈ (8/3, 3), the energy cap ‖u‖_c < c^s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    /// Unit mass and under the cap (or cap inapplicable).
    Inside,
    /// Under the cap but ‖u‖_{L²} < 1: in the ball, off the constraint sphere.
    InteriorMass,
    /// ‖u‖_{L²} > 1.
    OutsideMass,
    /// ‖u‖_c ≥ c^s.
    OutsideEnergy,
    /// Non-finite norms.
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub membership: Membership,
    pub mass: f64,
    pub c_norm: f64,
    /// c^s, or `None` when p ≤ 8/3 and the cap does not apply.
    pub cap: Option<f64>,
}

impl ConstraintCheck {
    pub fn cap_applicable(&self) -> bool {
        self.cap.is_some()
    }
}

/// Mass tolerance for "on the unit sphere".
pub const MASS_TOL: f64 = 1e-8;

pub fn in_constraint_set(ctx: &SpectralContext, u: &SpinorField) -> ConstraintCheck {
    let g = ctx.grid();
    let mass = u.norm();
    let c_norm = ctx.c_norm_sq(u).sqrt();
    let cap = constants(g.p).ok().and_then(|k| k.s_exp).map(|s| g.c.powf(s));
    let membership = if !mass.is_finite() || !c_norm.is_finite() {
        Membership::Undefined
    } else if mass > 1.0 + MASS_TOL {
        Membership::OutsideMass
    } else if cap.is_some_and(|cap| c_norm >= cap) {
        Membership::OutsideEnergy
    } else if mass < 1.0 - MASS_TOL {
        Membership::InteriorMass
    } else {
        Membership::Inside
    };
    ConstraintCheck {
        membership,
        mass,
        c_norm,
        cap,
    }
}

/// Relative defect of `I^{c',τ/c}(𝒯_c u) = c^{−2} I^{c,τ}(u)` where the
/// mass-preserving rescale moves u to the grid of half-width cL and speed of
/// light c' = c_grid/c (so c' = 1 when c equals the grid's c).
pub fn tau_c_duality_check(ctx: &SpectralContext, u: &SpinorField, c: f64) -> Result<f64, ParamError> {
    let u = u.clone().with_grid(*ctx.grid())?;
    let scaled = scale_field(&u, ScaleVariant::Mass, c)?;
    let target = SpectralContext::new(*scaled.grid());
    let lhs = energy(&target, &scaled).total;
    let rhs = energy(ctx, &u).total / (c * c);
    Ok((lhs - rhs).abs() / rhs.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use num_complex::Complex64;

    #[test]
    fn constants_examples() {
        let k = constants(8.0 / 3.0).unwrap();
        assert!((k.zeta - 1.0).abs() < 1e-15);
        assert!((k.theta - 3.0).abs() < 1e-14);
        assert!(k.s_exp.is_none());
        let k = constants(2.9).unwrap();
        assert!((k.s_exp.unwrap() - 1.7 / 1.4).abs() < 1e-12);
        let k = constants(2.5).unwrap();
        assert_eq!(k.zeta, 1.25);
        assert!((k.theta - 5.0).abs() < 1e-14);
        assert!(constants(3.0).is_err());
        assert!(constants(2.0).is_err());
    }

    #[test]
    fn constants_ranges() {
        for i in 1..100 {
            let p = 2.0 + i as f64 / 100.0;
            let k = constants(p).unwrap();
            assert!(k.zeta > 0.5 && k.zeta < 2.0);
            if p > 8.0 / 3.0 {
                let s = k.s_exp.unwrap();
                assert!(k.theta > 0.0);
                assert!(s > 1.0 && s < (3.0 * p - 6.0) / (6.0 * p - 16.0));
            }
        }
    }

    #[test]
    fn nonlinear_mass_of_constant() {
        let g = GridSpec::new(8, 1.5, 1.0, 1.0, 2.5, 1.0).unwrap();
        let zero = SpinorField::zeros(g);
        assert_eq!(nonlinear_mass(&zero, 2.5), 0.0);
        let a: f64 = 0.7;
        let u = SpinorField::from_fn(g, |_| {
            let v = Complex64::new(a / 2.0, 0.0);
            [v, v, v, v]
        });
        let expected = 2.0 / 2.5 * a.powf(2.5) * 27.0;
        assert!((nonlinear_mass(&u, 2.5) - expected).abs() < 1e-13 * expected);
    }

    #[test]
    fn membership_cases() {
        let g = GridSpec::new(8, 1.5, 1.0, 10.0, 2.9, 1.0).unwrap();
        let ctx = SpectralContext::new(g);
        let amp = 1.0 / g.box_volume().sqrt();
        let u = SpinorField::from_fn(g, |_| [Complex64::new(amp, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
        // ‖u‖_c² = mc² = 100 < c^{2s} = 10^{2.43}
        let chk = in_constraint_set(&ctx, &u);
        assert_eq!(chk.membership, Membership::Inside);
        assert!(chk.cap_applicable());
        let doubled = u.clone().scaled(2.0);
        assert_eq!(in_constraint_set(&ctx, &doubled).membership, Membership::OutsideMass);
        let half = u.clone().scaled(0.5);
        assert_eq!(in_constraint_set(&ctx, &half).membership, Membership::InteriorMass);

        let g83 = GridSpec { p: 8.0 / 3.0, ..g };
        let ctx83 = SpectralContext::new(g83);
        let chk = in_constraint_set(&ctx83, &u.clone().with_grid(g83).unwrap());
        assert!(!chk.cap_applicable());
        assert_eq!(chk.membership, Membership::Inside);
    }

    #[test]
    fn multiplier_rejects_unnormalized() {
        let g = GridSpec::new(8, 1.5, 1.0, 2.0, 2.5, 1.0).unwrap();
        let ctx = SpectralContext::new(g);
        let u = SpinorField::from_fn(g, |_| [Complex64::new(1.0, 0.0); 4]);
        assert!(matches!(multiplier(&ctx, &u), Err(ParamError::NotNormalized(_))));
    }

    #[test]
    fn pohozaev_of_zero_is_zero() {
        let g = GridSpec::new(8, 1.5, 1.0, 2.0, 2.5, 1.0).unwrap();
        let ctx = SpectralContext::new(g);
        assert_eq!(pohozaev_residual(&ctx, &SpinorField::zeros(g)), 0.0);
    }
}

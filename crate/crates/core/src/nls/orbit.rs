use num_complex::Complex64;

use super::model::LimitModel;
use super::su2::{su2_act, SU2Element};
use crate::error::ParamError;
use crate::field::PairField;
use crate::spectral::SpectralContext;

/// Best orbit element found for a two-component state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitFit {
    /// ‖f(· + shift) − γ·(h, 0)‖_{H¹}
    pub dist: f64,
    pub g_best: SU2Element,
    pub shift: [f64; 3],
    /// |a|² + |b|² < 0.5: f is far from the orbit and the fitted γ is unreliable.
    pub degenerate: bool,
}

/// Parabolic vertex offset (in cells) through three equally spaced samples.
fn vertex_offset(lo: f64, mid: f64, hi: f64) -> f64 {
    let curv = lo - 2.0 * mid + hi;
    if curv >= 0.0 {
        0.0
    } else {
        (0.5 * (lo - hi) / curv).clamp(-0.5, 0.5)
    }
}

pub fn orbit_distance(ctx: &SpectralContext, f: &PairField, model: &LimitModel) -> Result<OrbitFit, ParamError> {
    let g = *ctx.grid();
    if !g.same_mesh(model.grid()) || !g.same_mesh(f.grid()) {
        return Err(ParamError::GridMismatch("field, model and context must share a mesh".into()));
    }
    let rho = f.density();
    let peak = rho
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty grid");
    let idx = g.unravel(peak);
    let n = g.n;
    let mut shift = [0.0; 3];
    for axis in 0..3 {
        let nb = |d: isize| {
            let mut j = idx;
            j[axis] = (idx[axis] as isize + d).rem_euclid(n as isize) as usize;
            rho[g.index(j[0], j[1], j[2])]
        };
        let off = vertex_offset(nb(-1), nb(0), nb(1));
        shift[axis] = g.coord(idx[axis]) + off * g.spacing();
    }

    let centered = ctx.translate(f, shift);
    let h = model.h_values();
    let h_sq: f64 = h.iter().map(|v| v.norm_sqr()).sum::<f64>();
    let overlap = |k: usize| -> Complex64 {
        h.iter().zip(centered.component(k)).map(|(a, b)| a.conj() * b).sum::<Complex64>() / h_sq
    };
    let (a, b) = (overlap(0), overlap(1));
    let weight = a.norm_sqr() + b.norm_sqr();
    let g_best = SU2Element::normalizing(a, b).unwrap_or_else(SU2Element::identity);
    let target = su2_act(&g_best, &model.h);
    let dist = ctx.sobolev_norm(&centered.sub(&target), 1.0);
    Ok(OrbitFit {
        dist,
        g_best,
        shift,
        degenerate: weight < 0.5,
    })
}

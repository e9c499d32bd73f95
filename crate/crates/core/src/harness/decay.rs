use serde::{Deserialize, Serialize};

use super::fit::least_squares;
use super::HarnessError;
use crate::field::SpinorField;

/// Upper (P_∞⁺) or lower (P_∞⁻) spinor pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Fitted rate δ in `|component| ≈ prefactor·e^{−δ|x|}`.
    pub delta: f64,
    pub prefactor: f64,
    pub window: (f64, f64),
    /// ln(max/min) of the shell averages inside the window.
    pub e_foldings: f64,
    /// (shell radius, shell-averaged modulus)
    pub shells: Vec<(f64, f64)>,
}

/// Decay fit over the default window [0.3L, 0.8L].
pub fn fit_decay(u: &SpinorField, component: Component) -> Result<DecayFit, HarnessError> {
    fit_decay_window(u, component, 0.3, 0.8)
}

/// Least-squares slope of log(shell-averaged |component|) against |x| for
/// `lo·L ≤ |x| ≤ hi·L`, with shells one grid spacing thick.
pub fn fit_decay_window(u: &SpinorField, component: Component, lo: f64, hi: f64) -> Result<DecayFit, HarnessError> {
    let g = u.grid();
    let h = g.spacing();
    let (r_lo, r_hi) = (lo * g.half_width, hi * g.half_width);
    let offset = match component {
        Component::Upper => 0,
        Component::Lower => 2,
    };
    let (a, b) = (u.component(offset), u.component(offset + 1));
    let bins = ((r_hi - r_lo) / h).ceil() as usize;
    let mut sum_mod = vec![0.0; bins];
    let mut sum_r = vec![0.0; bins];
    let mut count = vec![0usize; bins];
    for node in 0..g.nodes() {
        let x = g.position(node);
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r < r_lo || r > r_hi {
            continue;
        }
        let k = (((r - r_lo) / h) as usize).min(bins - 1);
        sum_mod[k] += (a[node].norm_sqr() + b[node].norm_sqr()).sqrt();
        sum_r[k] += r;
        count[k] += 1;
    }
    let shells: Vec<(f64, f64)> = (0..bins)
        .filter(|&k| count[k] > 0 && sum_mod[k] > 0.0)
        .map(|k| (sum_r[k] / count[k] as f64, sum_mod[k] / count[k] as f64))
        .collect();
    let (max, min) = shells
        .iter()
        .fold((0.0f64, f64::INFINITY), |(mx, mn), s| (mx.max(s.1), mn.min(s.1)));
    let e_foldings = if shells.len() >= 2 { (max / min).ln() } else { 0.0 };
    if e_foldings < 4.0 {
        return Err(HarnessError::TailTooShort { e_foldings });
    }
    let logs: Vec<(f64, f64)> = shells.iter().map(|&(r, m)| (r, m.ln())).collect();
    let (slope, intercept, _) = least_squares(&logs);
    Ok(DecayFit {
        delta: -slope,
        prefactor: intercept.exp(),
        window: (r_lo, r_hi),
        e_foldings,
        shells,
    })
}

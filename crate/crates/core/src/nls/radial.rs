use std::io::Write;
use std::path::Path;

use super::NlsError;
use crate::error::ParamError;
use crate::ode::{integrate, Flow, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    pub r_max: f64,
    pub bracket: (f64, f64),
    /// Required final bracket width on U(0).
    pub width: f64,
    /// Spacing of the stored uniform mesh.
    pub dr: f64,
    /// Radius where the outward solution from r = 0 meets the inward solution
    /// started on the `A e^{−r}/r` tail at `r_max`.
    pub r_match: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            r_max: 40.0,
            bracket: (1.0, 10.0),
            width: 1e-12,
            dr: 1e-3,
            r_match: 3.0,
        }
    }
}

/// Positive decreasing radial solution of `U'' + (2/r)U' − U + U^{p−1} = 0`, sampled
/// on `r_i = i·dr`, `i = 0..=n`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub p: f64,
    pub r_max: f64,
    pub dr: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
    /// ‖U_p‖_{L²(ℝ³)}
    pub mass_l2: f64,
    /// Beyond `r_max` the profile is `tail_amp·e^{−r}/r`.
    pub tail_amp: f64,
}

impl RadialProfile {
    pub fn samples(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| i as f64 * self.dr)
    }

    pub fn u0(&self) -> f64 {
        self.values[0]
    }

    fn tail(&self, r: f64) -> f64 {
        self.tail_amp * (-r).exp() / r
    }

    /// U_p(|r|) by cubic Hermite interpolation of the stored mesh.
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        if r >= self.r_max {
            return self.tail(r);
        }
        let s = r / self.dr;
        let i = (s.floor() as usize).min(self.values.len() - 2);
        let t = s - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i] * self.dr, self.slopes[i + 1] * self.dr);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1
    }

    /// Two-column CSV `r,U`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<(), NlsError> {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(["r", "U"])?;
        for (r, u) in self.radii().zip(&self.values) {
            w.write_record([format!("{r:.16e}"), format!("{u:.16e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<(), NlsError> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shot {
    Overshoot,
    Undershoot,
}

const TAYLOR_R: f64 = 1e-4;

fn ode_tol() -> Tolerances {
    Tolerances {
        rtol: 1e-12,
        atol: 1e-18,
        h_max: 0.02,
        h_init: 1e-4,
    }
}

fn start(p: f64, u0: f64) -> [f64; 2] {
    let f0 = u0 - u0.powf(p - 1.0);
    [u0 + f0 * TAYLOR_R * TAYLOR_R / 6.0, f0 * TAYLOR_R / 3.0]
}

fn rhs(p: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    move |r, y| {
        let [u, v] = *y;
        [v, -2.0 * v / r + u - u.abs().powf(p - 2.0) * u]
    }
}

fn shoot(p: f64, u0: f64, r_max: f64) -> Result<Shot, NlsError> {
    let mut shot = Shot::Undershoot;
    integrate(rhs(p), TAYLOR_R, start(p, u0), r_max, ode_tol(), |_, y, _| {
        if y[0] < 0.0 {
            shot = Shot::Overshoot;
            Flow::Stop
        } else if y[1] > 0.0 || y[0] > 2.0 * u0 {
            Flow::Stop
        } else {
            Flow::Continue
        }
    })
    .map_err(|e| NlsError::Integration { r: e.t })?;
    Ok(shot)
}

pub fn solve_up(p: f64, tol: f64) -> Result<RadialProfile, NlsError> {
    solve_up_with(
        p,
        ShootingOptions {
            width: tol,
            ..Default::default()
        },
    )
}

/// Bisection shooting on U(0), then a two-sided match.
///
/// Any error δ in U(0) excites the growing branch, which reaches relative size
/// δ·e^{2r}, so the outward solution alone cannot be carried to the tail. The
/// bisected U(0) and the amplitude of the linear tail are refined by Newton so
/// that the outward and inward solutions agree in (U, U') at `r_match`.
pub fn solve_up_with(p: f64, opts: ShootingOptions) -> Result<RadialProfile, NlsError> {
    if !(p > 2.0 && p < 6.0) {
        return Err(ParamError::OutOfRange {
            name: "p",
            value: p,
            range: "(2, 6)",
        }
        .into());
    }
    let (mut lo, mut hi) = opts.bracket;
    if shoot(p, lo, opts.r_max)? != Shot::Undershoot || shoot(p, hi, opts.r_max)? != Shot::Overshoot {
        return Err(NlsError::NoBracket { lo, hi });
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shoot(p, mid, opts.r_max)? {
            Shot::Overshoot => hi = mid,
            Shot::Undershoot => lo = mid,
        }
    }
    debug_assert!(hi - lo <= opts.width);
    build_profile(p, lo, opts)
}

fn outward(p: f64, u0: f64, r_end: f64, dr: f64, mut sample: impl FnMut(f64, [f64; 2])) -> Result<[f64; 2], NlsError> {
    let rhs = rhs(p);
    let tol = Tolerances { h_init: dr, ..ode_tol() };
    let mut y = start(p, u0);
    let mut r = TAYLOR_R;
    let steps = (r_end / dr).round() as usize;
    for i in 1..=steps {
        let ri = i as f64 * dr;
        if ri > TAYLOR_R {
            y = integrate(&rhs, r, y, ri, tol, |_, _, _| Flow::Continue).map_err(|e| NlsError::Integration { r: e.t })?.1;
            r = ri;
        }
        sample(ri, y);
    }
    Ok(y)
}

fn tail_state(amp: f64, r: f64) -> [f64; 2] {
    let e = amp * (-r).exp();
    [e / r, -e * (1.0 / r + 1.0 / (r * r))]
}

/// Integrates from `r_max` down to `r_end` in steps of `dr`, in the reflected variable s = −r.
fn inward(p: f64, amp: f64, r_max: f64, r_end: f64, dr: f64, mut sample: impl FnMut(f64, [f64; 2])) -> Result<[f64; 2], NlsError> {
    let rhs = rhs(p);
    let back = |s: f64, y: &[f64; 2]| {
        let d = rhs(-s, y);
        [-d[0], -d[1]]
    };
    let tol = Tolerances {
        h_init: dr,
        atol: 1e-300,
        ..ode_tol()
    };
    let mut y = tail_state(amp, r_max);
    let steps = ((r_max - r_end) / dr).round() as usize;
    let mut r = r_max;
    for i in 1..=steps {
        let ri = r_max - i as f64 * dr;
        y = integrate(&back, -r, y, -ri, tol, |_, _, _| Flow::Continue).map_err(|e| NlsError::Integration { r: -e.t })?.1;
        r = ri;
        sample(ri, y);
    }
    Ok(y)
}

fn build_profile(p: f64, u0: f64, opts: ShootingOptions) -> Result<RadialProfile, NlsError> {
    let n = 2 * (opts.r_max / (2.0 * opts.dr)).ceil() as usize;
    let dr = opts.r_max / n as f64;
    let i_match = (opts.r_match / dr).round() as usize;
    let r_match = i_match as f64 * dr;

    // initial amplitude from the outward solution before the growing branch shows
    let mut y_probe = [0.0; 2];
    let r_probe = 8.0;
    outward(p, u0, r_probe, dr, |r, y| {
        if (r - r_probe).abs() < 0.5 * dr {
            y_probe = y;
        }
    })?;
    let mut x = [u0, y_probe[0] * r_probe * r_probe.exp()];
    let mismatch = |x: [f64; 2], h: f64| -> Result<[f64; 2], NlsError> {
        let a = outward(p, x[0], r_match, h, |_, _| {})?;
        let b = inward(p, x[1], opts.r_max, r_match, h, |_, _| {})?;
        Ok([a[0] - b[0], a[1] - b[1]])
    };
    let mut residual = f64::INFINITY;
    for _ in 0..30 {
        let f = mismatch(x, dr)?;
        residual = f[0].abs().max(f[1].abs());
        if residual < 1e-15 * x[0] {
            break;
        }
        let mut jac = [[0.0; 2]; 2];
        for k in 0..2 {
            let mut xp = x;
            let step = 1e-7 * x[k].abs();
            xp[k] += step;
            let fp = mismatch(xp, dr)?;
            jac[0][k] = (fp[0] - f[0]) / step;
            jac[1][k] = (fp[1] - f[1]) / step;
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        x[0] -= (jac[1][1] * f[0] - jac[0][1] * f[1]) / det;
        x[1] -= (-jac[1][0] * f[0] + jac[0][0] * f[1]) / det;
    }
    if residual > 1e-12 * x[0] {
        return Err(NlsError::NoMatch { mismatch: residual });
    }
    let [u0, tail_amp] = x;

    let mut values = vec![0.0; n + 1];
    let mut slopes = vec![0.0; n + 1];
    values[0] = u0;
    outward(p, u0, r_match, dr, |r, y| {
        let i = (r / dr).round() as usize;
        values[i] = y[0];
        slopes[i] = y[1];
    })?;
    let [u_end, v_end] = tail_state(tail_amp, opts.r_max);
    values[n] = u_end;
    slopes[n] = v_end;
    let inner_val = values[i_match];
    inward(p, tail_amp, opts.r_max, r_match, dr, |r, y| {
        let i = (r / dr).round() as usize;
        values[i] = y[0];
        slopes[i] = y[1];
    })?;
    debug_assert!((values[i_match] - inner_val).abs() < 1e-9);

    let simpson: f64 = (0..=n)
        .map(|i| {
            let r = i as f64 * dr;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * r * r * values[i] * values[i]
        })
        .sum::<f64>()
        * dr
        / 3.0;
    let mass_l2 = (4.0 * std::f64::consts::PI * simpson).sqrt();

    Ok(RadialProfile {
        p,
        r_max: opts.r_max,
        dr,
        values,
        slopes,
        mass_l2,
        tail_amp,
    })
}

fn nu_exponent(p: f64) -> Result<f64, ParamError> {
    if !(p > 2.0 && p < 10.0 / 3.0) {
        return Err(ParamError::OutOfRange {
            name: "p",
            value: p,
            range: "(2, 10/3)",
        });
    }
    Ok(3.0 * (p - 2.0) / (10.0 - 3.0 * p))
}

/// ν = (2m / ‖U_p‖^{4/3})^{3(p−2)/(10−3p)}.
pub fn nu_formula(p: f64, m: f64, up_mass: f64) -> Result<f64, ParamError> {
    let e = nu_exponent(p)?;
    if !(m > 0.0) {
        return Err(ParamError::OutOfRange {
            name: "m",
            value: m,
            range: "(0, ∞)",
        });
    }
    if !(up_mass > 0.0) {
        return Err(ParamError::OutOfRange {
            name: "up_mass",
            value: up_mass,
            range: "(0, ∞)",
        });
    }
    Ok((2.0 * m / up_mass.powf(4.0 / 3.0)).powf(e))
}

/// Inverse of [`nu_formula`] in its last argument: ‖U_p‖ = ν^{−1/(p−2)} (2mν)^{3/4}.
pub fn up_mass_from_nu(p: f64, m: f64, nu: f64) -> Result<f64, ParamError> {
    nu_exponent(p)?;
    Ok(nu.powf(-1.0 / (p - 2.0)) * (2.0 * m * nu).powf(0.75))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_fixed_point_and_scaling() {
        for &p in &[2.2, 2.5, 3.1] {
            assert!((nu_formula(p, 1.0, 2f64.powf(0.75)).unwrap() - 1.0).abs() < 1e-14);
            let a = nu_formula(p, 1.0, 7.0).unwrap();
            let b = nu_formula(p, 2.0, 7.0).unwrap();
            let e = 3.0 * (p - 2.0) / (10.0 - 3.0 * p);
            assert!((b / a - 2f64.powf(e)).abs() < 1e-12 * b / a);
            let back = up_mass_from_nu(p, 1.3, nu_formula(p, 1.3, 7.0).unwrap()).unwrap();
            assert!((back - 7.0).abs() < 1e-12);
        }
        assert!(nu_formula(10.0 / 3.0, 1.0, 1.0).is_err());
        assert!(nu_formula(2.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn profile_is_positive_decreasing_with_peak_above_one() {
        let prof = solve_up(2.5, 1e-12).unwrap();
        assert!(prof.u0() > 1.0);
        assert!(prof.samples().iter().all(|&u| u > 0.0));
        assert!(prof.samples().windows(2).all(|w| w[1] < w[0]));
        assert!((prof.u0() - 4.276541696914081).abs() < 1e-9);
    }

    #[test]
    fn bad_bracket_is_reported() {
        let opts = ShootingOptions {
            bracket: (5.0, 10.0),
            ..Default::default()
        };
        assert!(matches!(solve_up_with(2.5, opts), Err(NlsError::NoBracket { .. })));
    }
}

//! Adaptive Dormand–Prince 5(4) integration for small autonomous-size systems.

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub h_init: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct StepUnderflow {
    pub t: f64,
}

const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` towards `t_end`, calling `observe` at the
/// start and after every accepted step with `(t, y, y')`. Returns the last
/// accepted `(t, y)`.
pub(crate) fn integrate<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    tol: Tolerances,
    mut observe: impl FnMut(f64, &[f64; N], &[f64; N]) -> Flow,
) -> Result<(f64, [f64; N]), StepUnderflow> {
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    if observe(t, &y, &k1) == Flow::Stop {
        return Ok((t, y));
    }
    let mut h = tol.h_init.min(tol.h_max);
    while t < t_end {
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let mut k = [[0.0; N]; 7];
        k[0] = k1;
        for s in 1..7 {
            let mut ys = y;
            for (i, v) in ys.iter_mut().enumerate() {
                *v += h * (0..s).map(|j| A[s - 1][j] * k[j][i]).sum::<f64>();
            }
            k[s] = f(t + C[s - 1] * h, &ys);
        }
        let mut y_new = y;
        for (i, v) in y_new.iter_mut().enumerate() {
            *v += h * (0..6).map(|j| A[5][j] * k[j][i]).sum::<f64>();
        }
        let err = (0..N)
            .map(|i| {
                let e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
                let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
                (e / sc).powi(2)
            })
            .sum::<f64>()
            / N as f64;
        let err = err.sqrt();
        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k[6];
            if observe(t, &y, &k1) == Flow::Stop {
                return Ok((t, y));
            }
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * fac).min(tol.h_max);
        if t < t_end && h < 1e-14 * t.abs().max(1.0) {
            return Err(StepUnderflow { t });
        }
    }
    Ok((t, y))
}

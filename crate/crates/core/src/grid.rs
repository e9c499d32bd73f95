//! Periodic grids on [−L, L)³ and the physical parameters of a run.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// Grid resolution, box size and the physical parameters (m, c, p, τ).
///
/// Nodes sit at `x_j = −L + j·h` with `h = 2L/N`; node `(ix, iy, iz)` has flat
/// index `ix + N·(iy + N·iz)`. The frequency lattice is `(π/L)·{−N/2,…,N/2−1}³`
/// in FFT order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub half_width: f64,
    pub mass: f64,
    pub c: f64,
    pub p: f64,
    pub tau: f64,
}

fn check(name: &'static str, value: f64, ok: bool, range: &'static str) -> Result<(), ParamError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ParamError::OutOfRange { name, value, range })
    }
}

impl GridSpec {
    pub fn new(n: usize, half_width: f64, mass: f64, c: f64, p: f64, tau: f64) -> Result<Self, ParamError> {
        let g = Self {
            n,
            half_width,
            mass,
            c,
            p,
            tau,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        check("N", self.n as f64, self.n >= 8 && self.n % 2 == 0, "even integers ≥ 8")?;
        check("L", self.half_width, self.half_width > 0.0, "(0, ∞)")?;
        check("m", self.mass, self.mass > 0.0, "(0, ∞)")?;
        check("c", self.c, self.c > 0.0, "(0, ∞)")?;
        check("p", self.p, self.p > 2.0 && self.p < 3.0, "(2, 3)")?;
        // τ = 0 is admitted as the linear limit of the functional family.
        check("tau", self.tau, (0.0..=1.0).contains(&self.tau), "[0, 1]")?;
        Ok(())
    }

    pub fn with_c(mut self, c: f64) -> Result<Self, ParamError> {
        self.c = c;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tau(mut self, tau: f64) -> Result<Self, ParamError> {
        self.tau = tau;
        self.validate()?;
        Ok(self)
    }

    pub fn with_n(mut self, n: usize) -> Result<Self, ParamError> {
        self.n = n;
        self.validate()?;
        Ok(self)
    }

    pub fn with_half_width(mut self, half_width: f64) -> Result<Self, ParamError> {
        self.half_width = half_width;
        self.validate()?;
        Ok(self)
    }

    /// Number of grid nodes, N³.
    pub fn nodes(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Quadrature weight h³.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    /// Volume of the periodic box, (2L)³.
    pub fn box_volume(&self) -> f64 {
        (2.0 * self.half_width).powi(3)
    }

    pub fn rest_energy(&self) -> f64 {
        self.mass * self.c * self.c
    }

    /// τ^ζ with ζ = 5 − 3p/2.
    pub fn tau_zeta(&self) -> f64 {
        if self.tau == 0.0 {
            0.0
        } else {
            self.tau.powf(5.0 - 1.5 * self.p)
        }
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        ix + self.n * (iy + self.n * iz)
    }

    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx % n, (idx / n) % n, idx / (n * n)]
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let [ix, iy, iz] = self.unravel(idx);
        [self.coord(ix), self.coord(iy), self.coord(iz)]
    }

    /// Integer wavenumber of FFT bin `i`, in {−N/2, …, N/2−1}.
    pub fn mode_number(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn wavenumber(&self, i: usize) -> f64 {
        PI / self.half_width * self.mode_number(i) as f64
    }

    pub fn frequency(&self, idx: usize) -> [f64; 3] {
        let [ix, iy, iz] = self.unravel(idx);
        [self.wavenumber(ix), self.wavenumber(iy), self.wavenumber(iz)]
    }

    /// True when both grids share resolution and box, i.e. fields can be combined pointwise.
    pub fn same_mesh(&self, other: &GridSpec) -> bool {
        self.n == other.n && self.half_width == other.half_width
    }
}

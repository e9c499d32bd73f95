//! Fourier-side algebra of the free Dirac operator `𝒟_c = −icα·∇ + mc²β`.
//!
//! Every operator here is a Fourier multiplier: at each lattice frequency ξ it
//! acts on the four spinor coefficients by a 4×4 matrix built from
//! `D̂_c(ξ) = [[mc² I₂, cσ·ξ], [cσ·ξ, −mc² I₂]]` and `λ_c(ξ) = √(m²c⁴ + c²|ξ|²)`.
//!
//! Quantities that would lose digits to the rest energy at large c are evaluated
//! in rest-subtracted form, using `λ_c − mc² = c²|ξ|² / (λ_c + mc²)`.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::ParamError;
use crate::fft::Fft3;
use crate::field::{Field, SpinorField, Spectrum};
use crate::grid::GridSpec;

type C = Complex64;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FwDirection {
    Forward,
    Inverse,
}

/// Which isometry [`scale_field`] realises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleVariant {
    /// `T_c u(x) = c^{−1/2} u(x/c)`: maps ‖·‖_c onto the c/c-rescaled energy norm.
    Energy,
    /// `𝒯_c u(x) = c^{−3/2} u(x/c)`: preserves the L² norm.
    Mass,
}

/// Cached per-frequency data.
#[derive(Debug, Clone, Copy)]
pub struct Mode {
    pub xi: [f64; 3],
    pub xi2: f64,
    /// λ_c(ξ)
    pub lambda: f64,
    /// λ_c(ξ) − mc², evaluated without cancellation.
    pub kin: f64,
}

/// σ·ξ applied to a two-spinor (a, b).
#[inline]
pub fn sigma_dot(xi: &[f64; 3], a: C, b: C) -> (C, C) {
    let [x, y, z] = *xi;
    (a * z + b * C::new(x, -y), a * C::new(x, y) - b * z)
}

/// The symbol matrix D̂_c(ξ) as a dense Hermitian 4×4 matrix.
pub fn dirac_symbol(xi: [f64; 3], grid: &GridSpec) -> Matrix4<C> {
    let mc2 = C::new(grid.rest_energy(), 0.0);
    let c = grid.c;
    let sx = C::new(c * xi[0], 0.0);
    let sy = C::new(0.0, c * xi[1]);
    let sz = C::new(c * xi[2], 0.0);
    let zero = C::new(0.0, 0.0);
    // c σ·ξ = [[cξ₃, cξ₁ − icξ₂], [cξ₁ + icξ₂, −cξ₃]]
    let s00 = sz;
    let s01 = sx - sy;
    let s10 = sx + sy;
    let s11 = -sz;
    Matrix4::new(
        mc2, zero, s00, s01, //
        zero, mc2, s10, s11, //
        s00, s01, -mc2, zero, //
        s10, s11, zero, -mc2,
    )
}

/// Fourier multipliers of one grid, built once and shared by all operators.
#[derive(Debug, Clone)]
pub struct SpectralContext {
    grid: GridSpec,
    fft: Fft3,
    modes: Vec<Mode>,
}

impl SpectralContext {
    pub fn new(grid: GridSpec) -> Self {
        let mc2 = grid.rest_energy();
        let c = grid.c;
        let modes = (0..grid.nodes())
            .into_par_iter()
            .map(|i| {
                let xi = grid.frequency(i);
                let xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                let lambda = (mc2 * mc2 + c * c * xi2).sqrt();
                let kin = c * c * xi2 / (lambda + mc2);
                Mode { xi, xi2, lambda, kin }
            })
            .collect();
        Self {
            grid,
            fft: Fft3::new(grid.n),
            modes,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    fn check_mesh(&self, g: &GridSpec) {
        assert!(
            self.grid.same_mesh(g),
            "field mesh (N={}, L={}) does not match context mesh (N={}, L={})",
            g.n,
            g.half_width,
            self.grid.n,
            self.grid.half_width
        );
    }

    pub fn forward<const K: usize>(&self, u: &Field<K>) -> Spectrum<K> {
        self.check_mesh(u.grid());
        let mut data = u.data().to_vec();
        data.par_chunks_mut(self.grid.nodes()).for_each(|block| self.fft.forward(block));
        Spectrum { grid: *u.grid(), data }
    }

    pub fn inverse<const K: usize>(&self, s: Spectrum<K>) -> Field<K> {
        let grid = s.grid;
        let mut data = s.data;
        data.par_chunks_mut(self.grid.nodes()).for_each(|block| self.fft.inverse(block));
        Field::from_data(grid, data).expect("inverse transform of a finite spectrum")
    }

    /// Applies `f(mode, v)` to the spinor coefficients of every mode.
    pub fn map_spinor(&self, s: &Spectrum<4>, f: impl Fn(&Mode, [C; 4]) -> [C; 4] + Sync) -> Spectrum<4> {
        let m = self.grid.nodes();
        let mut out = Spectrum::<4>::zeros(s.grid);
        let src = &s.data;
        let (o0, rest) = out.data.split_at_mut(m);
        let (o1, rest) = rest.split_at_mut(m);
        let (o2, o3) = rest.split_at_mut(m);
        o0.par_chunks_mut(CHUNK)
            .zip(o1.par_chunks_mut(CHUNK))
            .zip(o2.par_chunks_mut(CHUNK))
            .zip(o3.par_chunks_mut(CHUNK))
            .enumerate()
            .for_each(|(ci, (((c0, c1), c2), c3))| {
                let base = ci * CHUNK;
                for j in 0..c0.len() {
                    let i = base + j;
                    let r = f(&self.modes[i], [src[i], src[m + i], src[2 * m + i], src[3 * m + i]]);
                    c0[j] = r[0];
                    c1[j] = r[1];
                    c2[j] = r[2];
                    c3[j] = r[3];
                }
            });
        out
    }

    /// Multiplies each component by a scalar symbol `f(mode)`.
    pub fn map_scalar<const K: usize>(&self, s: &Spectrum<K>, f: impl Fn(&Mode) -> f64 + Sync) -> Spectrum<K> {
        let m = self.grid.nodes();
        let mut out = s.clone();
        out.data.par_chunks_mut(m).for_each(|block| {
            for (v, mode) in block.iter_mut().zip(&self.modes) {
                *v *= f(mode);
            }
        });
        out
    }

    /// `h³/N³ · Σ_modes f(mode, v)`: Parseval-weighted reduction.
    pub fn mode_sum<const K: usize>(&self, s: &Spectrum<K>, f: impl Fn(&Mode, [C; K]) -> f64 + Sync) -> f64 {
        let total: f64 = (0..self.grid.nodes())
            .into_par_iter()
            .map(|i| f(&self.modes[i], s.at(i)))
            .sum();
        total * s.weight()
    }

    fn spinor_op(&self, u: &SpinorField, f: impl Fn(&Mode, [C; 4]) -> [C; 4] + Sync) -> SpinorField {
        let s = self.forward(u);
        self.inverse(self.map_spinor(&s, f))
    }

    // ---- per-mode kernels -------------------------------------------------

    #[inline]
    pub fn dirac_mode(&self, mode: &Mode, v: [C; 4]) -> [C; 4] {
        let mc2 = self.grid.rest_energy();
        let c = self.grid.c;
        let (sb0, sb1) = sigma_dot(&mode.xi, v[2], v[3]);
        let (sa0, sa1) = sigma_dot(&mode.xi, v[0], v[1]);
        [
            v[0] * mc2 + sb0 * c,
            v[1] * mc2 + sb1 * c,
            sa0 * c - v[2] * mc2,
            sa1 * c - v[3] * mc2,
        ]
    }

    /// (D̂_c − mc²)v, free of the O(mc²) upper-block cancellation.
    #[inline]
    pub fn dirac_shifted_mode(&self, mode: &Mode, v: [C; 4]) -> [C; 4] {
        let two_mc2 = 2.0 * self.grid.rest_energy();
        let c = self.grid.c;
        let (sb0, sb1) = sigma_dot(&mode.xi, v[2], v[3]);
        let (sa0, sa1) = sigma_dot(&mode.xi, v[0], v[1]);
        [sb0 * c, sb1 * c, sa0 * c - v[2] * two_mc2, sa1 * c - v[3] * two_mc2]
    }

    /// ½(I ± D̂_c/λ_c) v with the diagonal weights written as (λ ± mc²)/(2λ).
    #[inline]
    pub fn project_mode(&self, mode: &Mode, v: [C; 4], sign: Sign) -> [C; 4] {
        let mc2 = self.grid.rest_energy();
        let big = (mode.lambda + mc2) / (2.0 * mode.lambda);
        let small = mode.kin / (2.0 * mode.lambda);
        let q = self.grid.c / (2.0 * mode.lambda);
        let (sb0, sb1) = sigma_dot(&mode.xi, v[2], v[3]);
        let (sa0, sa1) = sigma_dot(&mode.xi, v[0], v[1]);
        match sign {
            Sign::Plus => [
                v[0] * big + sb0 * q,
                v[1] * big + sb1 * q,
                sa0 * q + v[2] * small,
                sa1 * q + v[3] * small,
            ],
            Sign::Minus => [
                v[0] * small - sb0 * q,
                v[1] * small - sb1 * q,
                -sa0 * q + v[2] * big,
                -sa1 * q + v[3] * big,
            ],
        }
    }

    /// U(ξ) v = Υ₊v ± Υ₋ β(α·ξ)/|ξ| v, with (α·ξ)/|ξ| := 0 at ξ = 0.
    #[inline]
    pub fn fw_mode(&self, mode: &Mode, v: [C; 4], dir: FwDirection) -> [C; 4] {
        let mc2 = self.grid.rest_energy();
        let up = ((mode.lambda + mc2) / (2.0 * mode.lambda)).sqrt();
        let down = (mode.kin / (2.0 * mode.lambda)).sqrt();
        let norm = mode.xi2.sqrt();
        if norm == 0.0 {
            return v.map(|x| x * up);
        }
        let xh = [mode.xi[0] / norm, mode.xi[1] / norm, mode.xi[2] / norm];
        let s = match dir {
            FwDirection::Forward => down,
            FwDirection::Inverse => -down,
        };
        let (sb0, sb1) = sigma_dot(&xh, v[2], v[3]);
        let (sa0, sa1) = sigma_dot(&xh, v[0], v[1]);
        // β α·ξ̂ (a, b) = (σ·ξ̂ b, −σ·ξ̂ a)
        [
            v[0] * up + sb0 * s,
            v[1] * up + sb1 * s,
            v[2] * up - sa0 * s,
            v[3] * up - sa1 * s,
        ]
    }

    /// (D̂_c − z)^{−1} v with z = mc² + `z_shifted`, using D̂² = λ² I.
    #[inline]
    pub fn resolvent_mode(&self, mode: &Mode, v: [C; 4], z_shifted: f64) -> [C; 4] {
        let two_mc2 = 2.0 * self.grid.rest_energy();
        let denom = (mode.kin - z_shifted) * (mode.lambda + self.grid.rest_energy() + z_shifted);
        let dv = self.dirac_shifted_mode(mode, v);
        let zp = two_mc2 + z_shifted;
        [
            (dv[0] + v[0] * zp) / denom,
            (dv[1] + v[1] * zp) / denom,
            (dv[2] + v[2] * zp) / denom,
            (dv[3] + v[3] * zp) / denom,
        ]
    }

    // ---- field-level operators ---------------------------------------------

    /// Spectral projection P_c^± onto the positive/negative subspace of 𝒟_c.
    pub fn project(&self, u: &SpinorField, sign: Sign) -> SpinorField {
        self.spinor_op(u, |m, v| self.project_mode(m, v, sign))
    }

    pub fn project_spectrum(&self, s: &Spectrum<4>, sign: Sign) -> Spectrum<4> {
        self.map_spinor(s, |m, v| self.project_mode(m, v, sign))
    }

    pub fn apply_dirac(&self, u: &SpinorField) -> SpinorField {
        self.spinor_op(u, |m, v| self.dirac_mode(m, v))
    }

    /// (𝒟_c − mc²) u.
    pub fn apply_dirac_shifted(&self, u: &SpinorField) -> SpinorField {
        self.spinor_op(u, |m, v| self.dirac_shifted_mode(m, v))
    }

    /// |𝒟_c| u = √(−c²Δ + m²c⁴) u.
    pub fn apply_abs_dirac(&self, u: &SpinorField) -> SpinorField {
        self.inverse(self.map_scalar(&self.forward(u), |m| m.lambda))
    }

    pub fn fw_transform(&self, u: &SpinorField, dir: FwDirection) -> SpinorField {
        self.spinor_op(u, |m, v| self.fw_mode(m, v, dir))
    }

    /// (𝒟_c − z)^{−1} u for z = mc² + `z_shifted` strictly inside the gap.
    pub fn resolvent(&self, u: &SpinorField, z_shifted: f64) -> SpinorField {
        self.spinor_op(u, |m, v| self.resolvent_mode(m, v, z_shifted))
    }

    /// ‖u‖_c² = ∫ λ_c(ξ) |û(ξ)|² dξ.
    pub fn c_norm_sq(&self, u: &SpinorField) -> f64 {
        let s = self.forward(u);
        self.mode_sum(&s, |m, v| m.lambda * norm_sqr(&v))
    }

    /// ‖u‖_c² − mc²‖u‖²_{L²}.
    pub fn c_norm_sq_shifted(&self, u: &SpinorField) -> f64 {
        let s = self.forward(u);
        self.c_norm_sq_shifted_spectrum(&s)
    }

    pub fn c_norm_sq_shifted_spectrum(&self, s: &Spectrum<4>) -> f64 {
        self.mode_sum(s, |m, v| m.kin * norm_sqr(&v))
    }

    /// ‖u‖_{H^s} = (∫ (1 + |ξ|²)^s |û|²)^{1/2}.
    pub fn sobolev_norm<const K: usize>(&self, u: &Field<K>, s: f64) -> f64 {
        let spec = self.forward(u);
        self.sobolev_norm_spectrum(&spec, s)
    }

    pub fn sobolev_norm_spectrum<const K: usize>(&self, spec: &Spectrum<K>, s: f64) -> f64 {
        self.mode_sum(spec, |m, v| (1.0 + m.xi2).powf(s) * norm_sqr(&v)).sqrt()
    }

    /// ‖∇u‖²_{L²}.
    pub fn gradient_norm_sq<const K: usize>(&self, u: &Field<K>) -> f64 {
        let spec = self.forward(u);
        self.mode_sum(&spec, |m, v| m.xi2 * norm_sqr(&v))
    }

    pub fn laplacian<const K: usize>(&self, u: &Field<K>) -> Field<K> {
        self.inverse(self.map_scalar(&self.forward(u), |m| -m.xi2))
    }

    /// Spectral translation: returns `v(x) = u(x + shift)`.
    pub fn translate<const K: usize>(&self, u: &Field<K>, shift: [f64; 3]) -> Field<K> {
        let mut s = self.forward(u);
        let m = self.grid.nodes();
        s.data.par_chunks_mut(m).for_each(|block| {
            for (v, mode) in block.iter_mut().zip(&self.modes) {
                let phase = mode.xi[0] * shift[0] + mode.xi[1] * shift[1] + mode.xi[2] * shift[2];
                *v *= C::from_polar(1.0, phase);
            }
        });
        self.inverse(s)
    }
}

#[inline]
pub(crate) fn norm_sqr<const K: usize>(v: &[C; K]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// P_∞^± : keeps the upper (Plus) or lower (Minus) pair, zeroing the other.
pub fn project_infinity(u: &SpinorField, sign: Sign) -> SpinorField {
    let mut out = u.clone();
    let m = u.grid().nodes();
    let range = match sign {
        Sign::Plus => 2 * m..4 * m,
        Sign::Minus => 0..2 * m,
    };
    out.data_mut()[range].iter_mut().for_each(|v| *v = C::new(0.0, 0.0));
    out
}

/// Rescales `u` to the grid of half-width cL.
///
/// With the same N the rescaled samples sit exactly on the new nodes, so no
/// interpolation is involved; frequencies map as ξ ↦ ξ/c. The target grid
/// carries `c' = c_grid/c` (and `τ' = τ/c` for the mass variant), which makes
/// `‖T_c u‖_{c'} = ‖u‖_c` and `I^{c',τ'}(𝒯_c u) = c^{−2} I^{c,τ}(u)` exact.
pub fn scale_field(u: &SpinorField, variant: ScaleVariant, c: f64) -> Result<SpinorField, ParamError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(ParamError::OutOfRange {
            name: "c",
            value: c,
            range: "(0, ∞)",
        });
    }
    let g = *u.grid();
    let mut target = GridSpec {
        half_width: g.half_width * c,
        c: g.c / c,
        ..g
    };
    let factor = match variant {
        ScaleVariant::Energy => c.powf(-0.5),
        ScaleVariant::Mass => {
            target.tau = g.tau / c;
            c.powf(-1.5)
        }
    };
    target.validate()?;
    Ok(u.clone().scaled(factor).with_grid(target)?)
}

/// Band-limited resampling onto `n_target` points per axis (same box):
/// spectra are zero-padded or truncated to the target lattice.
pub fn resample<const K: usize>(u: &Field<K>, n_target: usize) -> Result<Field<K>, ParamError> {
    let src = *u.grid();
    let target = src.with_n(n_target)?;
    let (n0, n1) = (src.n, n_target);
    let fft0 = Fft3::new(n0);
    let fft1 = Fft3::new(n1);
    let m0 = src.nodes();
    let m1 = target.nodes();
    let mut out = vec![C::new(0.0, 0.0); K * m1];
    let keep = n0.min(n1) as i64;
    let ratio = m1 as f64 / m0 as f64;
    for k in 0..K {
        let mut block = u.component(k).to_vec();
        fft0.forward(&mut block);
        let dst = &mut out[k * m1..(k + 1) * m1];
        let bin = |mode: i64, n: usize| -> usize { mode.rem_euclid(n as i64) as usize };
        for iz in 0..n0 {
            let kz = src.mode_number(iz);
            if kz < -keep / 2 || kz >= keep / 2 {
                continue;
            }
            for iy in 0..n0 {
                let ky = src.mode_number(iy);
                if ky < -keep / 2 || ky >= keep / 2 {
                    continue;
                }
                for ix in 0..n0 {
                    let kx = src.mode_number(ix);
                    if kx < -keep / 2 || kx >= keep / 2 {
                        continue;
                    }
                    let j = bin(kx, n1) + n1 * (bin(ky, n1) + n1 * bin(kz, n1));
                    dst[j] = block[src.index(ix, iy, iz)] * ratio;
                }
            }
        }
        fft1.inverse(dst);
    }
    Field::from_data(target, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(c: f64) -> GridSpec {
        GridSpec::new(8, 3.0, 1.0, c, 2.5, 1.0).unwrap()
    }

    fn zero_mode_field(g: GridSpec, v: [C; 4]) -> SpinorField {
        let norm = (norm_sqr(&v) * g.box_volume()).sqrt();
        SpinorField::from_fn(g, move |_| v.map(|x| x / norm))
    }

    #[test]
    fn symbol_at_zero_frequency() {
        let m = dirac_symbol([0.0; 3], &grid(2.0));
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j {
                    if i < 2 {
                        4.0
                    } else {
                        -4.0
                    }
                } else {
                    0.0
                };
                assert_eq!(m[(i, j)], C::new(expected, 0.0));
            }
        }
    }

    #[test]
    fn zero_mode_projections_and_dirac() {
        let g = grid(2.0);
        let ctx = SpectralContext::new(g);
        let v = [C::new(1.0, 0.5), C::new(-0.3, 0.0), C::new(0.2, 0.1), C::new(0.0, -1.0)];
        let u = zero_mode_field(g, v);
        let plus = ctx.project(&u, Sign::Plus);
        let minus = ctx.project(&u, Sign::Minus);
        let node = 17;
        let (a, b, uu) = (plus.at(node), minus.at(node), u.at(node));
        for k in 0..4 {
            let (ep, em) = if k < 2 { (uu[k], C::new(0.0, 0.0)) } else { (C::new(0.0, 0.0), uu[k]) };
            assert!((a[k] - ep).norm() < 1e-14);
            assert!((b[k] - em).norm() < 1e-14);
        }
        let du = ctx.apply_dirac(&u);
        let beta = [1.0, 1.0, -1.0, -1.0];
        for k in 0..4 {
            assert!((du.at(node)[k] - uu[k] * 4.0 * beta[k]).norm() < 1e-12);
        }
        // ‖u‖_c² = mc² for a normalized zero mode
        assert!((ctx.c_norm_sq(&u) - 4.0).abs() < 1e-12);
        let fw = ctx.fw_transform(&u, FwDirection::Forward);
        assert!(fw.sub(&u).norm() < 1e-14);
    }

    #[test]
    fn project_infinity_splits_components() {
        let g = grid(1.0);
        let u = SpinorField::from_fn(g, |x| {
            [C::new(x[0], 1.0), C::new(2.0, x[1]), C::new(x[2], 0.0), C::new(0.0, 3.0)]
        });
        let p = project_infinity(&u, Sign::Plus);
        let m = project_infinity(&u, Sign::Minus);
        assert_eq!(p.at(5)[0], u.at(5)[0]);
        assert_eq!(p.at(5)[2], C::new(0.0, 0.0));
        assert_eq!(m.at(5)[1], C::new(0.0, 0.0));
        let sum = SpinorField::lin_comb(1.0, &p, 1.0, &m);
        assert_eq!(sum, u);
    }

    #[test]
    fn plane_wave_c_norm() {
        let g = grid(3.0);
        let ctx = SpectralContext::new(g);
        let xi0 = [g.wavenumber(1), g.wavenumber(2), g.wavenumber(7)];
        let amp = 1.0 / g.box_volume().sqrt();
        let u = SpinorField::from_fn(g, |x| {
            let ph = C::from_polar(amp, xi0[0] * x[0] + xi0[1] * x[1] + xi0[2] * x[2]);
            [ph, C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)]
        });
        let xi2: f64 = xi0.iter().map(|v| v * v).sum();
        let lam = (81.0 + 9.0 * xi2).sqrt();
        assert!((u.norm() - 1.0).abs() < 1e-12);
        assert!((ctx.c_norm_sq(&u) - lam).abs() < 1e-10 * lam);
    }

    #[test]
    fn scale_rejects_nonpositive_c_and_c_one_is_identity() {
        let g = grid(2.0);
        let u = zero_mode_field(g, [C::new(1.0, 0.0); 4]);
        assert!(scale_field(&u, ScaleVariant::Mass, 0.0).is_err());
        assert!(scale_field(&u, ScaleVariant::Energy, -2.0).is_err());
        for variant in [ScaleVariant::Energy, ScaleVariant::Mass] {
            let v = scale_field(&u, variant, 1.0).unwrap();
            assert_eq!(v, u);
        }
    }

    #[test]
    fn resample_preserves_band_limited_field() {
        let g = grid(1.0);
        let k = std::f64::consts::PI / g.half_width;
        let f = move |x: [f64; 3]| [C::from_polar(1.0, k * x[0] - 2.0 * k * x[2]) + C::new(0.3, 0.0), C::new(0.0, (k * x[1]).cos())];
        let coarse = crate::field::PairField::from_fn(g, f);
        let fine = resample(&coarse, 16).unwrap();
        let exact = crate::field::PairField::from_fn(g.with_n(16).unwrap(), f);
        assert!(fine.sub(&exact).norm() < 1e-12);
        let back = resample(&fine, 8).unwrap();
        assert!(back.sub(&coarse).norm() < 1e-12);
    }
}

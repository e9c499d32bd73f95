//! Sampled multi-component fields on a periodic grid.
//!
//! Storage is component-major: all N³ values of component 0, then component 1,
//! and so on, each block x-fastest. This is also the on-disk order used by
//! [`crate::harness::field_io`].

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::ParamError;
use crate::grid::GridSpec;

/// A ℂᴷ-valued field sampled on the nodes of a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field<const K: usize> {
    grid: GridSpec,
    data: Vec<Complex64>,
}

/// Four-component Dirac spinor.
pub type SpinorField = Field<4>;
/// Two-component field: upper/lower pair of a spinor, or a Pauli wave function.
pub type PairField = Field<2>;

/// Unnormalized discrete Fourier coefficients of a [`Field`], same layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<const K: usize> {
    pub(crate) grid: GridSpec,
    pub(crate) data: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl<const K: usize> Field<K> {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            data: vec![ZERO; K * grid.nodes()],
        }
    }

    pub fn from_data(grid: GridSpec, data: Vec<Complex64>) -> Result<Self, ParamError> {
        let expected = K * grid.nodes();
        if data.len() != expected {
            return Err(ParamError::BadLength {
                got: data.len(),
                expected,
            });
        }
        if data.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(ParamError::NonFinite);
        }
        Ok(Self { grid, data })
    }

    /// Samples `f(x)` at every node.
    pub fn from_fn(grid: GridSpec, f: impl Fn([f64; 3]) -> [Complex64; K] + Sync) -> Self {
        let m = grid.nodes();
        let values: Vec<[Complex64; K]> = (0..m).into_par_iter().map(|i| f(grid.position(i))).collect();
        let mut data = vec![ZERO; K * m];
        for (i, v) in values.iter().enumerate() {
            for k in 0..K {
                data[k * m + i] = v[k];
            }
        }
        Self { grid, data }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    /// Same samples, reinterpreted on a grid with different physical parameters
    /// but the same mesh.
    pub fn with_grid(mut self, grid: GridSpec) -> Result<Self, ParamError> {
        if grid.nodes() != self.grid.nodes() {
            return Err(ParamError::GridMismatch(format!("{} vs {} nodes", grid.nodes(), self.grid.nodes())));
        }
        self.grid = grid;
        Ok(self)
    }

    pub fn component(&self, k: usize) -> &[Complex64] {
        let m = self.grid.nodes();
        &self.data[k * m..(k + 1) * m]
    }

    pub fn component_mut(&mut self, k: usize) -> &mut [Complex64] {
        let m = self.grid.nodes();
        &mut self.data[k * m..(k + 1) * m]
    }

    pub fn at(&self, node: usize) -> [Complex64; K] {
        let m = self.grid.nodes();
        std::array::from_fn(|k| self.data[k * m + node])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Pointwise |u(x)|² = Σ_k |u_k(x)|².
    pub fn density(&self) -> Vec<f64> {
        let m = self.grid.nodes();
        let mut rho = vec![0.0; m];
        for k in 0..K {
            for (r, v) in rho.iter_mut().zip(&self.data[k * m..(k + 1) * m]) {
                *r += v.norm_sqr();
            }
        }
        rho
    }

    /// ⟨u, v⟩_{L²} = h³ Σ conj(u)·v.
    pub fn inner(&self, other: &Self) -> Complex64 {
        debug_assert!(self.grid.same_mesh(&other.grid));
        let s: Complex64 = self
            .data
            .par_iter()
            .zip(other.data.par_iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        s * self.grid.cell_volume()
    }

    /// Re⟨u, v⟩_{L²}, the real inner product used for tangent spaces.
    pub fn re_inner(&self, other: &Self) -> f64 {
        self.inner(other).re
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.par_iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&mut self, s: f64) {
        self.data.par_iter_mut().for_each(|v| *v *= s);
    }

    pub fn scale_complex(&mut self, s: Complex64) {
        self.data.par_iter_mut().for_each(|v| *v *= s);
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.scale(s);
        self
    }

    /// `self += a · x`
    pub fn axpy(&mut self, a: f64, x: &Self) {
        debug_assert!(self.grid.same_mesh(&x.grid));
        self.data.par_iter_mut().zip(x.data.par_iter()).for_each(|(y, x)| *y += x * a);
    }

    /// `a · x + b · y`
    pub fn lin_comb(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        let data = x.data.par_iter().zip(y.data.par_iter()).map(|(u, v)| u * a + v * b).collect();
        Self { grid: x.grid, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::lin_comb(1.0, self, -1.0, other)
    }

    /// Rescales to unit L² norm and returns the previous norm.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            self.scale(1.0 / n);
        }
        n
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    /// Multiplies by the unit phase that makes ⟨reference, self⟩ real and non-negative.
    pub fn align_phase(&mut self, reference: &Self) {
        let ov = reference.inner(self);
        if ov.norm() > 0.0 {
            self.scale_complex(ov.conj() / ov.norm());
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.density().into_iter().fold(0.0, f64::max).sqrt()
    }
}

impl Field<4> {
    /// Builds a spinor from its upper and lower pairs.
    pub fn from_pairs(upper: &PairField, lower: &PairField) -> Result<Self, ParamError> {
        if !upper.grid.same_mesh(&lower.grid) {
            return Err(ParamError::GridMismatch("upper and lower pairs differ".into()));
        }
        let mut data = Vec::with_capacity(4 * upper.grid.nodes());
        data.extend_from_slice(&upper.data);
        data.extend_from_slice(&lower.data);
        Ok(Self {
            grid: upper.grid,
            data,
        })
    }

    /// Upper pair (components 1, 2).
    pub fn upper(&self) -> PairField {
        let m = self.grid.nodes();
        Field {
            grid: self.grid,
            data: self.data[..2 * m].to_vec(),
        }
    }

    /// Lower pair (components 3, 4).
    pub fn lower(&self) -> PairField {
        let m = self.grid.nodes();
        Field {
            grid: self.grid,
            data: self.data[2 * m..].to_vec(),
        }
    }
}

impl<const K: usize> Spectrum<K> {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn at(&self, mode: usize) -> [Complex64; K] {
        let m = self.grid.nodes();
        std::array::from_fn(|k| self.data[k * m + mode])
    }

    pub(crate) fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            data: vec![ZERO; K * grid.nodes()],
        }
    }

    /// Parseval factor converting Σ|Û|² into ∫|u|²: h³/N³.
    pub fn weight(&self) -> f64 {
        self.grid.cell_volume() / self.grid.nodes() as f64
    }

    /// Re⟨u, v⟩_{L²} evaluated on the coefficients.
    pub fn re_inner(&self, other: &Self) -> f64 {
        let s: f64 = self
            .data
            .par_iter()
            .zip(other.data.par_iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        s * self.weight()
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.par_iter().map(|v| v.norm_sqr()).sum::<f64>() * self.weight()
    }

    /// `self += a · x`
    pub fn axpy(&mut self, a: f64, x: &Self) {
        self.data.par_iter_mut().zip(x.data.par_iter()).for_each(|(y, x)| *y += x * a);
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.data.par_iter_mut().for_each(|v| *v *= s);
        self
    }
}

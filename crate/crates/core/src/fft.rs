//! Three-dimensional complex FFT on an N³ block stored x-fastest.
//!
//! Each pass transforms along the contiguous axis and then rotates the axes
//! (x, y, z) → (y, z, x); three passes restore the original layout.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Unnormalized forward transform, `Û_k = Σ_j u_j e^{−2πi j·k/N}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Inverse transform including the 1/N³ factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let scale = 1.0 / (self.n * self.n * self.n) as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }

    fn run(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "FFT block has wrong length");
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        let mut rotated = vec![Complex64::new(0.0, 0.0); data.len()];
        for _ in 0..3 {
            plan.process_with_scratch(data, &mut scratch);
            for z in 0..n {
                for y in 0..n {
                    let src = n * (y + n * z);
                    for x in 0..n {
                        rotated[y + n * (z + n * x)] = data[src + x];
                    }
                }
            }
            data.copy_from_slice(&rotated);
        }
    }
}

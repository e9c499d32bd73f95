#![allow(dead_code)]

use ndgs_core::acceptance::random_smooth;
use ndgs_core::{Complex64 as C, Field, GridSpec, SpectralContext, SpinorField};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn grid(n: usize, half_width: f64, c: f64) -> GridSpec {
    GridSpec::new(n, half_width, 1.0, c, 2.5, 1.0).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_field<const K: usize>(ctx: &SpectralContext, seed: u64) -> Field<K> {
    random_smooth(ctx, &mut rng(seed), 2.0)
}

/// Gaussian spinor with distinct complex weights per component.
pub fn gaussian_spinor(g: GridSpec, width: f64) -> SpinorField {
    let w = [C::new(1.0, 0.0), C::new(0.3, -0.4), C::new(-0.2, 0.1), C::new(0.0, 0.5)];
    SpinorField::from_fn(g, move |x| {
        let r2 = x[0] * x[0] + x[1] * x[1] + (x[2] - 0.3) * (x[2] - 0.3);
        let e = (-r2 / (2.0 * width * width)).exp();
        w.map(|k| k * e)
    })
    .normalized()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

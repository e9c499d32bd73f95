//! Fixtures shared by the criterion benches.

use ndgs_core::maxmin::{fw_embed, gaussian_pair};
use ndgs_core::{GridSpec, SpectralContext, SpinorField};

/// Standard benchmark mesh: p = 5/2, m = τ = 1, box half-width 12.
pub fn grid(n: usize, c: f64) -> GridSpec {
    GridSpec::new(n, 12.0, 1.0, c, 2.5, 1.0).expect("valid benchmark grid")
}

/// FW-embedded Gaussian of width 2 on `ctx`'s mesh.
pub fn trial_state(ctx: &SpectralContext) -> SpinorField {
    fw_embed(ctx, &gaussian_pair(ctx, 2.0))
}

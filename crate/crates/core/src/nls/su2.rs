use num_complex::Complex64;

use crate::error::ParamError;
use crate::field::PairField;

/// `γ = (α, −β̄; β, ᾱ)` with |α|² + |β|² = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SU2Element {
    alpha: Complex64,
    beta: Complex64,
}

impl SU2Element {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self, ParamError> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(ParamError::OutOfRange {
                name: "|α|²+|β|²",
                value: n,
                range: "1 ± 1e-12",
            });
        }
        Ok(Self { alpha, beta })
    }

    /// Scales (α, β) onto the unit sphere; `None` for (0, 0).
    pub fn normalizing(alpha: Complex64, beta: Complex64) -> Option<Self> {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        (n > 0.0 && n.is_finite()).then(|| Self {
            alpha: alpha / n,
            beta: beta / n,
        })
    }

    pub fn identity() -> Self {
        Self {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn inverse(&self) -> Self {
        Self {
            alpha: self.alpha.conj(),
            beta: -self.beta,
        }
    }

    /// `γ·(z, w) = (αz − β̄w, βz + ᾱw)`.
    #[inline]
    pub fn apply(&self, z: Complex64, w: Complex64) -> (Complex64, Complex64) {
        (self.alpha * z - self.beta.conj() * w, self.beta * z + self.alpha.conj() * w)
    }
}

pub fn su2_act(g: &SU2Element, f: &PairField) -> PairField {
    let n = f.grid().nodes();
    let mut out = f.clone();
    let data = out.data_mut();
    let (up, lo) = data.split_at_mut(n);
    for (z, w) in up.iter_mut().zip(lo.iter_mut()) {
        (*z, *w) = g.apply(*z, *w);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_and_swap() {
        let g = GridSpec::new(8, 2.0, 1.0, 1.0, 2.5, 1.0).unwrap();
        let f = PairField::from_fn(g, |x| [c(x[0], x[1]), c(x[2], 1.0)]);
        assert_eq!(su2_act(&SU2Element::identity(), &f).data(), f.data());
        let swap = SU2Element::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let out = su2_act(&swap, &f);
        for node in 0..g.nodes() {
            let [z, w] = f.at(node);
            assert_eq!(out.at(node), [-w, z]);
        }
    }

    #[test]
    fn rejects_non_unit() {
        assert!(SU2Element::new(c(1.0, 0.0), c(0.1, 0.0)).is_err());
        assert!(SU2Element::normalizing(c(0.0, 0.0), c(0.0, 0.0)).is_none());
    }

    #[test]
    fn inverse_undoes_action() {
        let g = SU2Element::normalizing(c(0.3, -1.2), c(0.7, 0.4)).unwrap();
        let (z, w) = (c(0.5, 0.25), c(-1.0, 2.0));
        let (a, b) = g.apply(z, w);
        let (z2, w2) = g.inverse().apply(a, b);
        assert!((z2 - z).norm() < 1e-15 && (w2 - w).norm() < 1e-15);
    }
}

//! `λ |u|^{2k} u` by collocation.
//!
//! The coefficient integrand `|u|^{2k} u Φ_α` is a polynomial of degree at
//! most `(2k + 2) N` times `e^{-(k+1)|x|^2}`, so a Gauss–Hermite rule dilated
//! by `c = sqrt(k + 1)` with `(k + 1) N + 1` points per axis projects the
//! product exactly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermite::{gauss_hermite_rule, HermiteExpansion, QuadratureRule, SpectralGrid};

/// Points per axis needed for an exact projection.
pub fn required_order(degree: usize, k: usize) -> usize {
    (k + 1) * degree + 1
}

/// `u (u conj u)^k`
#[inline]
pub(crate) fn power(u: Complex64, k: usize) -> Complex64 {
    let m = u.norm_sqr();
    let mut p = 1.0;
    for _ in 0..k {
        p *= m;
    }
    u * p
}

/// Precomputed collocation grid for a fixed `(d, N, k)`.
#[derive(Debug, Clone)]
pub struct Nonlinearity {
    k: usize,
    grid: SpectralGrid,
}

impl Nonlinearity {
    pub fn new(dim: usize, degree: usize, k: usize) -> Result<Self> {
        let rule = gauss_hermite_rule(required_order(degree, k))?;
        Self::with_rule(dim, degree, k, &rule)
    }

    pub fn with_rule(dim: usize, degree: usize, k: usize, rule: &QuadratureRule) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        let required = required_order(degree, k);
        if rule.order() < required {
            return Err(Error::InsufficientOrder {
                order: rule.order(),
                required,
            });
        }
        let basis = crate::hermite::HermiteBasis::shared(dim, degree)?;
        let grid = SpectralGrid::new(basis, &rule.spatial_dilated(((k + 1) as f64).sqrt()));
        Ok(Nonlinearity { k, grid })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn apply(&self, e: &HermiteExpansion, lambda: Complex64) -> Result<HermiteExpansion> {
        let u = self.grid.synthesize_values(e)?;
        let values: Vec<Complex64> = u.iter().map(|&v| lambda * power(v, self.k)).collect();
        self.grid.analyze_values(&values)
    }
}

/// One-shot `λ |u|^{2k} u` with a caller-supplied rule.
pub fn nonlinearity(e: &HermiteExpansion, k: usize, lambda: Complex64, rule: &QuadratureRule) -> Result<HermiteExpansion> {
    Nonlinearity::with_rule(e.dim(), e.degree(), k, rule)?.apply(e, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::{hermite_eval, HermiteBasis};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_maps_to_zero() {
        let z = HermiteExpansion::zeros(2, 5).unwrap();
        let out = Nonlinearity::new(2, 5, 1).unwrap().apply(&z, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(out.l2_norm(), 0.0);
    }

    #[test]
    fn ground_state_cube_against_dense_grid() {
        let n = 12;
        let e = HermiteExpansion::from_real_1d(&[1.0]).unwrap().with_degree(n).unwrap();
        let out = Nonlinearity::new(1, n, 1).unwrap().apply(&e, Complex64::new(1.0, 0.0)).unwrap();
        let h = 1e-3;
        for m in 0..=n {
            let s: f64 = (-12000..=12000)
                .map(|j| {
                    let x = j as f64 * h;
                    std::f64::consts::PI.powf(-0.75) * (-1.5 * x * x).exp() * hermite_eval(m, x)
                })
                .sum::<f64>()
                * h;
            assert!((out.coeffs()[m].re - s).abs() < 1e-9, "m={m}");
            assert!(out.coeffs()[m].im.abs() < 1e-15);
        }
    }

    #[test]
    fn order_guard() {
        let e = HermiteExpansion::from_real_1d(&[1.0, 0.5, 0.2]).unwrap();
        let low = gauss_hermite_rule(4).unwrap();
        assert!(matches!(
            nonlinearity(&e, 1, Complex64::new(1.0, 0.0), &low),
            Err(Error::InsufficientOrder { required: 5, .. })
        ));
        let ok = gauss_hermite_rule(5).unwrap();
        assert!(nonlinearity(&e, 1, Complex64::new(1.0, 0.0), &ok).is_ok());
    }

    #[test]
    fn exact_rule_matches_overkill_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (dim, k) in [(1usize, 1usize), (1, 2), (2, 1)] {
            let basis = HermiteBasis::shared(dim, 6).unwrap();
            let c = (0..basis.len())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let e = HermiteExpansion::from_coeffs(basis, c).unwrap();
            let lambda = Complex64::new(0.3, -1.1);
            let a = Nonlinearity::new(dim, 6, k).unwrap().apply(&e, lambda).unwrap();
            let rule = gauss_hermite_rule(required_order(6, k) + 9).unwrap();
            let b = nonlinearity(&e, k, lambda, &rule).unwrap();
            assert!(a.sub(&b).unwrap().l2_norm() < 1e-12 * b.l2_norm(), "dim={dim} k={k}");
        }
    }

    #[test]
    fn phase_equivariance() {
        // N(e^{iθ} u) = e^{iθ} N(u)
        let e = HermiteExpansion::from_real_1d(&[0.4, -0.3, 0.2]).unwrap();
        let nl = Nonlinearity::new(1, 2, 2).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let rot = Complex64::from_polar(1.0, 0.7);
        let a = nl.apply(&e.scale(rot), one).unwrap();
        let b = nl.apply(&e, one).unwrap().scale(rot);
        assert!(a.sub(&b).unwrap().l2_norm() < 1e-15);
    }
}

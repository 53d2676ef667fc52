//! Fractional powers `H^β` and the heat semigroup `e^{-tH^β}`.
//!
//! Both act diagonally on Hermite coefficients: the eigenspace of total
//! order `k` carries the eigenvalue `(2k + d)` of `H`.

mod mehler;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::HermiteExpansion;

pub use mehler::{mehler_apply, mehler_kernel};

/// Semigroup factors below this are flushed to exact zero.
pub const UNDERFLOW_FLOOR: f64 = 1e-300;

/// `(2k + d)^β`
pub fn eigenvalue(k: usize, d: usize, beta: f64) -> f64 {
    let base = (2 * k + d) as f64;
    base.powf(beta)
}

/// `c_alpha -> (2|alpha| + d)^β c_alpha`
pub fn apply_fractional_power(e: &HermiteExpansion, beta: f64) -> HermiteExpansion {
    let d = e.dim();
    e.map_by_order(|k| Complex64::new(eigenvalue(k, d, beta), 0.0))
}

/// `e^{-t (2k + d)^β}` with the underflow flush applied.
pub fn decay_factor(k: usize, d: usize, beta: f64, t: f64) -> f64 {
    let f = (-t * eigenvalue(k, d, beta)).exp();
    if f < UNDERFLOW_FLOOR {
        0.0
    } else {
        f
    }
}

/// Parameters of one application of `e^{-tH^β}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowParams {
    pub beta: f64,
    pub t: f64,
    pub d: usize,
}

impl FlowParams {
    pub fn new(beta: f64, t: f64, d: usize) -> Result<Self> {
        let p = FlowParams { beta, t, d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::invalid(format!("beta must be positive, got {}", self.beta)));
        }
        if !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(Error::invalid(format!("t must be non-negative, got {}", self.t)));
        }
        if self.d == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        Ok(())
    }

    pub fn at(&self, t: f64) -> Self {
        FlowParams { t, ..*self }
    }

    /// `d^β`, the bottom of the spectrum of `H^β`.
    pub fn bottom_eigenvalue(&self) -> f64 {
        eigenvalue(0, self.d, self.beta)
    }
}

/// `c_alpha -> e^{-t (2|alpha| + d)^β} c_alpha`
pub fn apply_semigroup(e: &HermiteExpansion, p: &FlowParams) -> Result<HermiteExpansion> {
    p.validate()?;
    if p.d != e.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            got: p.d,
        });
    }
    Ok(e.map_by_order(|k| Complex64::new(decay_factor(k, p.d, p.beta, p.t), 0.0)))
}

/// Lebesgue exponents of the estimate `M^{p1,q1} -> M^{p2,q2}`; infinite
/// exponents are `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentSet {
    #[serde(with = "crate::phasespace::serde_exponent")]
    pub p1: f64,
    #[serde(with = "crate::phasespace::serde_exponent")]
    pub q1: f64,
    #[serde(with = "crate::phasespace::serde_exponent")]
    pub p2: f64,
    #[serde(with = "crate::phasespace::serde_exponent")]
    pub q2: f64,
}

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must lie in (0, inf], got {v}")))
    }
}

impl ExponentSet {
    pub fn new(p1: f64, q1: f64, p2: f64, q2: f64) -> Result<Self> {
        check_exponent("p1", p1)?;
        check_exponent("q1", q1)?;
        check_exponent("p2", p2)?;
        check_exponent("q2", q2)?;
        Ok(ExponentSet { p1, q1, p2, q2 })
    }

    /// Same exponents on both sides.
    pub fn diagonal(p: f64, q: f64) -> Result<Self> {
        Self::new(p, q, p, q)
    }

    /// `1/p~ = max(1/p2 - 1/p1, 0)`
    pub fn inv_ptilde(&self) -> f64 {
        (1.0 / self.p2 - 1.0 / self.p1).max(0.0)
    }

    /// `1/q~ = max(1/q2 - 1/q1, 0)`
    pub fn inv_qtilde(&self) -> f64 {
        (1.0 / self.q2 - 1.0 / self.q1).max(0.0)
    }

    pub fn ptilde(&self) -> f64 {
        1.0 / self.inv_ptilde()
    }

    pub fn qtilde(&self) -> f64 {
        1.0 / self.inv_qtilde()
    }

    /// Small-time exponent `σ = (d / 2β)(1/p~ + 1/q~)`.
    pub fn sigma(&self, d: usize, beta: f64) -> f64 {
        d as f64 / (2.0 * beta) * (self.inv_ptilde() + self.inv_qtilde())
    }

    /// Target exponents replaced by `min(p1, p2)`, `min(q1, q2)`. Modulation
    /// spaces grow with either exponent, so the reduced estimate implies the
    /// original one with the same σ.
    pub fn reduced(&self) -> Self {
        ExponentSet {
            p2: self.p2.min(self.p1),
            q2: self.q2.min(self.q1),
            ..*self
        }
    }
}

/// `C(t) = C0 e^{-t d^β}` for `t >= 1`, `C0 t^{-σ}` for `0 < t <= 1`.
pub fn theoretical_constant(p: &FlowParams, x: &ExponentSet, c0: f64) -> Result<f64> {
    if !(p.t > 0.0) {
        return Err(Error::invalid(format!("C(t) needs t > 0, got {}", p.t)));
    }
    if !(p.beta > 0.0) || p.d == 0 {
        return Err(Error::invalid("invalid flow parameters"));
    }
    Ok(if p.t >= 1.0 {
        c0 * (-p.t * p.bottom_eigenvalue()).exp()
    } else {
        c0 * p.t.powf(-x.sigma(p.d, p.beta))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::{HermiteBasis, MultiIndex};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const INF: f64 = f64::INFINITY;

    fn random_expansion(dim: usize, degree: usize, seed: u64) -> HermiteExpansion {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = HermiteBasis::shared(dim, degree).unwrap();
        let coeffs = (0..basis.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        HermiteExpansion::from_coeffs(basis, coeffs).unwrap()
    }

    fn max_rel_diff(a: &HermiteExpansion, b: &HermiteExpansion) -> f64 {
        a.coeffs()
            .iter()
            .zip(b.coeffs())
            .map(|(x, y)| (x - y).norm() / y.norm().max(1e-300))
            .filter(|r| r.is_finite())
            .fold(0.0, f64::max)
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenvalue(0, 1, 1.0), 1.0);
        assert!((eigenvalue(1, 2, 0.5) - 2.0).abs() < 1e-15);
        assert!((eigenvalue(0, 3, 1.7) - 3f64.powf(1.7)).abs() < 1e-13);
    }

    #[test]
    fn ground_state_fixed_by_h() {
        let e = HermiteExpansion::from_real_1d(&[1.0, 0.0]).unwrap();
        assert_eq!(apply_fractional_power(&e, 1.0), e);
        let r = random_expansion(2, 6, 1);
        assert_eq!(apply_fractional_power(&r, 0.0), r);
    }

    #[test]
    fn half_powers_compose_to_h() {
        for dim in [1, 2] {
            let e = random_expansion(dim, 10, 5);
            let half = apply_fractional_power(&apply_fractional_power(&e, 0.5), 0.5);
            let full = apply_fractional_power(&e, 1.0);
            assert!(max_rel_diff(&half, &full) < 1e-12);
        }
    }

    #[test]
    fn ground_state_decay_and_identity_at_zero() {
        for (d, beta) in [(1usize, 1.0), (2, 0.5), (2, 2.0)] {
            let e = HermiteExpansion::basis_function(&MultiIndex::from(vec![0; d]), 3).unwrap();
            let out = apply_semigroup(&e, &FlowParams::new(beta, 0.7, d).unwrap()).unwrap();
            let expect = (-0.7 * (d as f64).powf(beta)).exp();
            assert!((out.l2_norm() - expect).abs() < 1e-15);
        }
        let r = random_expansion(2, 5, 9);
        assert_eq!(apply_semigroup(&r, &FlowParams::new(1.3, 0.0, 2).unwrap()).unwrap(), r);
    }

    #[test]
    fn underflow_is_flushed() {
        let e = HermiteExpansion::from_real_1d(&[1.0; 30]).unwrap();
        let out = apply_semigroup(&e, &FlowParams::new(2.0, 10.0, 1).unwrap()).unwrap();
        assert!(out.coeffs()[29].norm() == 0.0);
        assert!(out.coeffs().iter().all(|c| c.norm() == 0.0 || c.norm() >= UNDERFLOW_FLOOR));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(FlowParams::new(0.0, 1.0, 1).is_err());
        assert!(FlowParams::new(1.0, -1.0, 1).is_err());
        let e = random_expansion(1, 3, 2);
        assert!(apply_semigroup(&e, &FlowParams::new(1.0, 1.0, 2).unwrap()).is_err());
    }

    #[test]
    fn sigma_examples() {
        let x = ExponentSet::new(INF, INF, 2.0, 2.0).unwrap();
        assert!((x.sigma(2, 1.0) - 1.0).abs() < 1e-15);
        assert!((x.sigma(1, 1.0) - 0.5).abs() < 1e-15);
        let same = ExponentSet::diagonal(3.0, 1.5).unwrap();
        assert_eq!(same.sigma(2, 0.7), 0.0);
        assert_eq!(same.ptilde(), INF);
        let p = FlowParams::new(0.7, 0.01, 2).unwrap();
        assert_eq!(theoretical_constant(&p, &same, 4.0).unwrap(), 4.0);
        assert!(ExponentSet::new(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn constant_two_regimes() {
        let x = ExponentSet::new(INF, 1.0, 1.0, 1.0).unwrap();
        let c = theoretical_constant(&FlowParams::new(2.0, 2.0, 1).unwrap(), &x, 1.0).unwrap();
        assert!((c - (-2f64).exp()).abs() < 1e-16);
        // sigma = (1/4)(1 + 0)
        let c = theoretical_constant(&FlowParams::new(2.0, 0.01, 1).unwrap(), &x, 3.0).unwrap();
        assert!((c - 3.0 * 0.01f64.powf(-0.25)).abs() < 1e-12);
        assert!(theoretical_constant(&FlowParams { beta: 1.0, t: 0.0, d: 1 }, &x, 1.0).is_err());
    }

    #[test]
    fn reduction_takes_minima() {
        let x = ExponentSet::new(2.0, 1.0, 4.0, 0.5).unwrap().reduced();
        assert_eq!((x.p2, x.q2), (2.0, 0.5));
        let orig = ExponentSet::new(2.0, 1.0, 4.0, 0.5).unwrap();
        assert_eq!(orig.sigma(1, 1.0), x.sigma(1, 1.0));
    }

    proptest! {
        #[test]
        fn semigroup_law(seed in any::<u64>(), beta in 0.3f64..2.5, dim in 1usize..=2) {
            let e = random_expansion(dim, 8, seed);
            let p = FlowParams::new(beta, 0.3, dim).unwrap();
            let two = apply_semigroup(&apply_semigroup(&e, &p).unwrap(), &p.at(0.7)).unwrap();
            let one = apply_semigroup(&e, &p.at(1.0)).unwrap();
            prop_assert!(two.sub(&one).unwrap().l2_norm() < 1e-13 * e.l2_norm());
        }

        #[test]
        fn contraction_by_ground_factor(seed in any::<u64>(), beta in 0.3f64..2.5, t in 0.0f64..4.0) {
            let e = random_expansion(2, 6, seed);
            let p = FlowParams::new(beta, t, 2).unwrap();
            let out = apply_semigroup(&e, &p).unwrap();
            prop_assert!(out.l2_norm() <= (-t * p.bottom_eigenvalue()).exp() * e.l2_norm() * (1.0 + 1e-14));
        }

        #[test]
        fn eigen_decay_exact(a0 in 0usize..6, a1 in 0usize..6, beta in 0.3f64..2.5, t in 0.0f64..3.0) {
            let alpha = MultiIndex::from(vec![a0, a1]);
            let e = HermiteExpansion::basis_function(&alpha, 12).unwrap();
            let out = apply_semigroup(&e, &FlowParams::new(beta, t, 2).unwrap()).unwrap();
            let x = t * ((2 * (a0 + a1) + 2) as f64).powf(beta);
            let expect = (-x).exp();
            // exp amplifies the rounding of its argument by x
            if expect < UNDERFLOW_FLOOR / 2.0 {
                prop_assert_eq!(out.l2_norm(), 0.0);
            } else if expect > UNDERFLOW_FLOOR * 2.0 {
                prop_assert!((out.l2_norm() - expect).abs() <= 1e-15 * (1.0 + x) * expect);
            }
        }

        #[test]
        fn commutes_with_projection(seed in any::<u64>(), k in 0usize..=6) {
            let e = random_expansion(2, 6, seed);
            let p = FlowParams::new(0.8, 0.4, 2).unwrap();
            let a = apply_semigroup(&e.project(k).unwrap(), &p).unwrap();
            let b = apply_semigroup(&e, &p).unwrap().project(k).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}

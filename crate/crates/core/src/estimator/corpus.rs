//! Deterministic 1-D test functions.
//!
//! Every entry is multiplied by a smooth taper that equals 1 on
//! `|x| <= L - 1` and vanishes for `|x| >= L`, so that point samples and
//! phase-space sums are well defined for functions outside `L^2`.
//! Power singularities `|x|^{-α}` are replaced by `(x^2 + δ^2)^{-α/2}`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::hermite::{synthesize_1d, HermiteBasis, HermiteExpansion, SpatialRule, SpectralGrid};
use crate::numeric::smooth_step;
use crate::phasespace::SampledFunction;

/// Support radius of the corpus functions.
pub const CORPUS_EXTENT: f64 = 8.0;
/// Mollification scale of the power singularities.
pub const MOLLIFIER: f64 = 1.0 / 64.0;
/// Half-width of the lattice cutoff.
pub const LATTICE_CUTOFF: f64 = 0.45;
/// Sampling step used for entries with `δ`-scale structure.
pub const FINE_STEP: f64 = 1.0 / 256.0;
const COARSE_STEP: f64 = 1.0 / 64.0;

pub fn taper(x: f64, extent: f64) -> f64 {
    1.0 - smooth_step(x.abs() - (extent - 1.0))
}

/// `(x^2 + δ^2)^{-α/2}`
pub fn f_alpha(x: f64, alpha: f64, delta: f64) -> f64 {
    (x * x + delta * delta).powf(-alpha / 2.0)
}

/// Smooth bump supported in `[-r, r]`, equal to 1 on `[-r/2, r/2]`.
pub fn cutoff(x: f64, r: f64) -> f64 {
    1.0 - smooth_step((x.abs() - r / 2.0) / (r / 2.0))
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub function: SampledFunction,
}

impl CorpusEntry {
    fn new(name: &str, step: f64, f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        let g = move |x: f64| f(x) * taper(x, CORPUS_EXTENT);
        CorpusEntry {
            name: name.to_string(),
            function: SampledFunction::new(name, g).with_support(CORPUS_EXTENT).with_step(step),
        }
    }

    fn real(name: &str, step: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(name, step, move |x| Complex64::new(f(x), 0.0))
    }

    fn expansion(name: &str, e: HermiteExpansion) -> Self {
        let e = Arc::new(e);
        Self::new(name, COARSE_STEP, move |x| synthesize_1d(&e, &[x]).expect("1-D")[0])
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.function.eval(x)
    }

    /// Degree-`n` Hermite projection by a dense trapezoid rule over the
    /// support.
    pub fn project(&self, degree: usize) -> Result<HermiteExpansion> {
        project_function(&self.function, degree)
    }
}

/// Trapezoid projection with step 1/512 over `[-L, L]`.
pub fn project_function(f: &SampledFunction, degree: usize) -> Result<HermiteExpansion> {
    let h = 1.0 / 512.0;
    let half = (CORPUS_EXTENT.min(f.support()) / h).ceil() as i64;
    let nodes: Vec<f64> = (-half..=half).map(|j| j as f64 * h).collect();
    let weights = vec![h; nodes.len()];
    let rule = SpatialRule { nodes, weights };
    let grid = SpectralGrid::new(HermiteBasis::shared(1, degree)?, &rule);
    let values: Vec<Complex64> = grid.points().iter().map(|p| f.eval(p[0])).collect();
    grid.analyze_values(&values)
}

fn random_expansion(rng: &mut ChaCha8Rng, degree: usize) -> HermiteExpansion {
    let c: Vec<Complex64> = (0..=degree)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    HermiteExpansion::from_coeffs(HermiteBasis::shared(1, degree).expect("valid"), c).expect("sized")
}

fn phi(n: usize) -> HermiteExpansion {
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    HermiteExpansion::from_real_1d(&c).expect("valid")
}

/// The 20-function corpus. `seed` drives the random expansions only.
pub fn corpus(seed: u64) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = MOLLIFIER;
    let lattice = move |x: f64| {
        let mut s = 0.0;
        let m = CORPUS_EXTENT as i64;
        for mu in -m..=m {
            let y = x - mu as f64;
            if y.abs() < LATTICE_CUTOFF {
                s += f_alpha(y, 0.3, d) * cutoff(y, LATTICE_CUTOFF);
            }
        }
        s
    };
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        CorpusEntry::expansion("phi0", phi(0)),
        CorpusEntry::expansion("phi1", phi(1)),
        CorpusEntry::expansion("phi2", phi(2)),
        CorpusEntry::expansion("phi0+phi1", HermiteExpansion::from_real_1d(&[r, r]).expect("valid")),
        CorpusEntry::expansion("random6a", random_expansion(&mut rng, 6)),
        CorpusEntry::real("f_alpha_0.2", FINE_STEP, move |x| f_alpha(x, 0.2, d)),
        CorpusEntry::real("f_alpha_0.3", FINE_STEP, move |x| f_alpha(x, 0.3, d)),
        CorpusEntry::real("f_alpha_0.45", FINE_STEP, move |x| f_alpha(x, 0.45, d)),
        CorpusEntry::real("chirp_f_alpha_0.3", FINE_STEP, move |x| f_alpha(x, 0.3, d) * (1.0 + 0.5 * (x * x).cos())),
        CorpusEntry::real("lattice_f_alpha_0.3", FINE_STEP, lattice),
        CorpusEntry::real("constant", COARSE_STEP, |_| 1.0),
        CorpusEntry::real("cos_abs_x", COARSE_STEP, |x| x.abs().cos()),
        CorpusEntry::real("cos_x_squared", COARSE_STEP, |x| (x * x).cos()),
        CorpusEntry::real("shifted_gaussian", COARSE_STEP, |x| (-(x - 2.0) * (x - 2.0) / 2.0).exp() * PI.powf(-0.25)),
        CorpusEntry::new("modulated_gaussian", COARSE_STEP, |x| {
            Complex64::from_polar((-x * x / 2.0).exp() * PI.powf(-0.25), 3.0 * x)
        }),
        CorpusEntry::real("sech", COARSE_STEP, |x| 1.0 / x.cosh()),
        CorpusEntry::real("lorentzian", COARSE_STEP, |x| 1.0 / (1.0 + x * x)),
        CorpusEntry::expansion("random6b", random_expansion(&mut rng, 6)),
        CorpusEntry::expansion("random10", random_expansion(&mut rng, 10)),
        CorpusEntry::real("wide_gaussian", COARSE_STEP, |x| (-x * x / 8.0).exp()),
    ]
}

/// `f_α` for α in {0.2, 0.3, 0.45}, projected to degree `degree`.
pub fn stress_family(degree: usize) -> Result<Vec<(String, HermiteExpansion)>> {
    corpus(0)
        .into_iter()
        .filter(|e| e.name.starts_with("f_alpha"))
        .map(|e| Ok((e.name.clone(), e.project(degree)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contents() {
        let c = corpus(7);
        assert_eq!(c.len(), 20);
        let names: Vec<&str> = c.iter().map(|e| e.name.as_str()).collect();
        for n in ["phi0", "phi1", "f_alpha_0.3", "lattice_f_alpha_0.3", "constant", "cos_x_squared"] {
            assert!(names.contains(&n), "{n}");
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 20);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let a = corpus(3);
        let b = corpus(3);
        let c = corpus(4);
        let x = 0.37;
        for (u, v) in a.iter().zip(&b) {
            assert_eq!(u.eval(x), v.eval(x));
        }
        assert_ne!(a[4].eval(x), c[4].eval(x));
    }

    #[test]
    fn tapered_and_mollified() {
        for e in corpus(0) {
            assert_eq!(e.eval(CORPUS_EXTENT + 0.01).norm(), 0.0, "{}", e.name);
            assert!(e.eval(0.0).norm().is_finite());
        }
        let f = &corpus(0)[6];
        assert!((f.eval(0.0).re - MOLLIFIER.powf(-0.3)).abs() < 1e-12);
        assert!((f.eval(2.0).re - 2f64.powf(-0.3)).abs() < 1e-4);
    }

    #[test]
    fn lattice_cutoff_support() {
        let lat = &corpus(0)[9];
        assert_eq!(lat.eval(0.5).norm(), 0.0);
        assert_eq!(lat.eval(3.46).norm(), 0.0);
        assert!(lat.eval(3.0).re > 1.0);
        assert!((cutoff(0.2, 0.45) - 1.0).abs() < 1e-15);
        assert_eq!(cutoff(0.45, 0.45), 0.0);
    }

    #[test]
    fn projection_of_eigenfunction() {
        let e = corpus(0)[1].project(6).unwrap();
        assert!((e.coeffs()[1].re - 1.0).abs() < 1e-10);
        for (i, c) in e.coeffs().iter().enumerate() {
            if i != 1 {
                assert!(c.norm() < 1e-10);
            }
        }
    }
}

//! Analysis and synthesis between point values and Hermite coefficients.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::expansion::{HermiteBasis, HermiteExpansion};
use super::functions::hermite_table;
use super::quadrature::{QuadratureRule, SpatialRule};
use crate::error::{Error, Result};

/// Tensor-product collocation grid with the basis functions tabulated on it.
///
/// Points are stored row-major (last axis fastest).
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    basis: Arc<HermiteBasis>,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    /// `phi[p * n_coeffs + a] = Phi_{alpha_a}(x_p)`
    phi: Vec<f64>,
}

/// Per-axis tables `h_0..h_degree` at each 1-D node.
fn axis_tables(nodes: &[f64], degree: usize) -> Vec<Vec<f64>> {
    nodes.iter().map(|&x| hermite_table(degree, x)).collect()
}

fn tensor_points(rule: &SpatialRule, dim: usize) -> (Vec<Vec<usize>>, Vec<Vec<f64>>, Vec<f64>) {
    let n = rule.len();
    let total = n.pow(dim as u32);
    let mut multi = Vec::with_capacity(total);
    let mut points = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    for flat in 0..total {
        let mut idx = vec![0usize; dim];
        let mut r = flat;
        for axis in (0..dim).rev() {
            idx[axis] = r % n;
            r /= n;
        }
        points.push(idx.iter().map(|&i| rule.nodes[i]).collect());
        weights.push(idx.iter().map(|&i| rule.weights[i]).product());
        multi.push(idx);
    }
    (multi, points, weights)
}

impl SpectralGrid {
    pub fn new(basis: Arc<HermiteBasis>, rule: &SpatialRule) -> Self {
        let dim = basis.dim();
        let tables = axis_tables(&rule.nodes, basis.degree());
        let (multi, points, weights) = tensor_points(rule, dim);
        let nc = basis.len();
        let mut phi = vec![0.0; points.len() * nc];
        phi.par_chunks_mut(nc).zip(multi.par_iter()).for_each(|(row, idx)| {
            for (a, alpha) in basis.indices().iter().enumerate() {
                row[a] = alpha
                    .entries()
                    .iter()
                    .zip(idx)
                    .map(|(&order, &node)| tables[node][order])
                    .product();
            }
        });
        SpectralGrid {
            basis,
            points,
            weights,
            phi,
        }
    }

    /// Grid on the Gauss–Hermite nodes, exact for `analyze(synthesize(e))`
    /// whenever `rule.order() >= degree + 1`.
    pub fn gauss(basis: Arc<HermiteBasis>, rule: &QuadratureRule) -> Result<Self> {
        let required = basis.degree() + 1;
        if rule.order() < required {
            return Err(Error::InsufficientOrder {
                order: rule.order(),
                required,
            });
        }
        Ok(Self::new(basis, &rule.spatial()))
    }

    pub fn basis(&self) -> &Arc<HermiteBasis> {
        &self.basis
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `c_alpha = sum_p W_p f(x_p) Phi_alpha(x_p)`.
    pub fn analyze_values(&self, values: &[Complex64]) -> Result<HermiteExpansion> {
        if values.len() != self.points.len() {
            return Err(Error::DimensionMismatch {
                expected: self.points.len(),
                got: values.len(),
            });
        }
        let nc = self.basis.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); nc];
        for ((row, &w), &v) in self.phi.chunks(nc).zip(&self.weights).zip(values) {
            let wv = v * w;
            for (c, &p) in coeffs.iter_mut().zip(row) {
                *c += wv * p;
            }
        }
        HermiteExpansion::from_coeffs(self.basis.clone(), coeffs)
    }

    /// Point values of the expansion on the grid.
    pub fn synthesize_values(&self, e: &HermiteExpansion) -> Result<Vec<Complex64>> {
        if e.dim() != self.basis.dim() || e.degree() != self.basis.degree() {
            return Err(Error::invalid("expansion basis differs from grid basis"));
        }
        let nc = self.basis.len();
        Ok(self
            .phi
            .chunks(nc)
            .map(|row| {
                row.iter()
                    .zip(e.coeffs())
                    .fold(Complex64::new(0.0, 0.0), |acc, (&p, c)| acc + c * p)
            })
            .collect())
    }
}

/// Hermite coefficients of `f` by Gauss–Hermite quadrature.
pub fn analyze<F>(f: F, dim: usize, degree: usize, rule: &QuadratureRule) -> Result<HermiteExpansion>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let basis = HermiteBasis::shared(dim, degree)?;
    let grid = SpectralGrid::gauss(basis, rule)?;
    let values: Vec<Complex64> = grid.points().par_iter().map(|x| f(x)).collect();
    grid.analyze_values(&values)
}

/// `sum_alpha c_alpha Phi_alpha(x)` at each point.
pub fn synthesize(e: &HermiteExpansion, points: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    let dim = e.dim();
    if let Some(bad) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    let degree = e.degree();
    let basis = e.basis().clone();
    Ok(points
        .par_iter()
        .map(|x| {
            let tables: Vec<Vec<f64>> = x.iter().map(|&xi| hermite_table(degree, xi)).collect();
            basis
                .indices()
                .iter()
                .zip(e.coeffs())
                .fold(Complex64::new(0.0, 0.0), |acc, (alpha, c)| {
                    let phi: f64 = alpha
                        .entries()
                        .iter()
                        .enumerate()
                        .map(|(axis, &o)| tables[axis][o])
                        .product();
                    acc + c * phi
                })
        })
        .collect())
}

/// Synthesize a 1-D expansion on scalar points.
pub fn synthesize_1d(e: &HermiteExpansion, xs: &[f64]) -> Result<Vec<Complex64>> {
    if e.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: e.dim(),
        });
    }
    let degree = e.degree();
    Ok(xs
        .par_iter()
        .map(|&x| {
            hermite_table(degree, x)
                .iter()
                .zip(e.coeffs())
                .fold(Complex64::new(0.0, 0.0), |acc, (&h, c)| acc + c * h)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::functions::{hermite_eval, PI_POW_NEG_QUARTER};
    use crate::hermite::quadrature::gauss_hermite_rule;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn insufficient_order_rejected() {
        let rule = gauss_hermite_rule(5).unwrap();
        let err = analyze(|_| re(1.0), 1, 5, &rule).unwrap_err();
        assert!(matches!(err, Error::InsufficientOrder { order: 5, required: 6 }));
    }

    #[test]
    fn basis_function_analyzes_to_unit_vector() {
        let rule = gauss_hermite_rule(21).unwrap();
        let e = analyze(|x| re(hermite_eval(3, x[0])), 1, 20, &rule).unwrap();
        for (n, c) in e.coeffs().iter().enumerate() {
            let expect = if n == 3 { 1.0 } else { 0.0 };
            assert!((c - re(expect)).norm() < 1e-12, "n={n} c={c}");
        }
    }

    #[test]
    fn linear_combination() {
        let rule = gauss_hermite_rule(12).unwrap();
        let e = analyze(
            |x| re(hermite_eval(0, x[0]) + 2.0 * hermite_eval(2, x[0])),
            1,
            10,
            &rule,
        )
        .unwrap();
        assert!((e.coeffs()[0] - re(1.0)).norm() < 1e-13);
        assert!((e.coeffs()[2] - re(2.0)).norm() < 1e-13);
        assert!(e.coeffs()[1].norm() < 1e-13 && e.coeffs()[3].norm() < 1e-13);
    }

    #[test]
    fn gaussian_against_dense_trapezoid() {
        // e^{-x^2} is not a polynomial times e^{-x^2/2}, so use a generous rule
        let rule = gauss_hermite_rule(80).unwrap();
        let e = analyze(|x| re((-x[0] * x[0]).exp()), 1, 12, &rule).unwrap();
        let h = 1e-3;
        for n in 0..=12 {
            let dense: f64 = (-12000..=12000)
                .map(|j| {
                    let x = j as f64 * h;
                    (-x * x).exp() * hermite_eval(n, x)
                })
                .sum::<f64>()
                * h;
            assert!((e.coeffs()[n] - re(dense)).norm() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn synthesize_ground_state_and_zero() {
        let e = HermiteExpansion::from_real_1d(&[1.0]).unwrap();
        let v = synthesize(&e, &[vec![0.0]]).unwrap();
        assert!((v[0] - re(PI_POW_NEG_QUARTER)).norm() < 1e-16);
        let z = HermiteExpansion::zeros(2, 4).unwrap();
        let v = synthesize(&z, &[vec![0.3, -1.0], vec![2.0, 0.0]]).unwrap();
        assert!(v.iter().all(|c| c.norm() == 0.0));
        assert!(synthesize(&z, &[vec![0.3]]).is_err());
    }

    #[test]
    fn round_trip_degree_eight() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for dim in [1usize, 2] {
            let basis = HermiteBasis::shared(dim, 8).unwrap();
            let coeffs = (0..basis.len())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let e = HermiteExpansion::from_coeffs(basis.clone(), coeffs).unwrap();
            let rule = gauss_hermite_rule(9).unwrap();
            let grid = SpectralGrid::gauss(basis, &rule).unwrap();
            let pts = synthesize(&e, grid.points()).unwrap();
            let back = grid.analyze_values(&pts).unwrap();
            for (a, b) in back.coeffs().iter().zip(e.coeffs()) {
                assert!((a - b).norm() < 1e-11);
            }
            let direct = grid.synthesize_values(&e).unwrap();
            for (a, b) in direct.iter().zip(&pts) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn parseval_under_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let basis = HermiteBasis::shared(2, 10).unwrap();
        let coeffs = (0..basis.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let e = HermiteExpansion::from_coeffs(basis.clone(), coeffs).unwrap();
        let rule = gauss_hermite_rule(11).unwrap();
        let grid = SpectralGrid::gauss(basis, &rule).unwrap();
        let v = grid.synthesize_values(&e).unwrap();
        let l2: f64 = v.iter().zip(grid.weights()).map(|(z, w)| z.norm_sqr() * w).sum();
        assert!((l2.sqrt() - e.l2_norm()).abs() < 1e-10 * e.l2_norm());
    }

    #[test]
    fn gram_matrix_is_identity() {
        for dim in [1usize, 2] {
            let basis = HermiteBasis::shared(dim, 12).unwrap();
            let rule = gauss_hermite_rule(13).unwrap();
            let grid = SpectralGrid::gauss(basis.clone(), &rule).unwrap();
            for (a, alpha) in basis.indices().iter().enumerate() {
                let unit = HermiteExpansion::basis_function(alpha, 12).unwrap();
                let v = grid.synthesize_values(&unit).unwrap();
                let back = grid.analyze_values(&v).unwrap();
                for (b, z) in back.coeffs().iter().enumerate() {
                    let delta = if a == b { 1.0 } else { 0.0 };
                    assert!((z - re(delta)).norm() < 1e-10);
                }
            }
        }
    }
}

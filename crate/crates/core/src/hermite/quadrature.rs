//! Gauss–Hermite quadrature
//!
//! `sum_i w_i p(x_i) = int p(x) e^{-x^2} dx` for every polynomial of degree
//! at most `2n - 1`. Nodes start from the eigenvalues of the Jacobi matrix
//! (Golub–Welsch) and are polished by Newton steps on the scaled
//! recurrence; weights use the Christoffel form `w_i = 1 / (n p_{n-1}(x_i)^2)`
//! evaluated in log space, which keeps full relative accuracy in the tails.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::functions::{log_abs_poly, poly_ratio};
use crate::error::{Error, Result};

/// Gauss–Hermite rule for the weight `e^{-x^2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `w_i e^{x_i^2}`: weights for plain integrals `int F(x) dx`.
    scaled_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weights with the Gaussian factor absorbed.
    pub fn scaled_weights(&self) -> &[f64] {
        &self.scaled_weights
    }

    /// Rule for plain integrals `int F(x) dx`, exact when
    /// `F(x) e^{x^2}` is a polynomial of degree `<= 2n - 1`.
    pub fn spatial(&self) -> SpatialRule {
        SpatialRule {
            nodes: self.nodes.clone(),
            weights: self.scaled_weights.clone(),
        }
    }

    /// Rule for `int F(x) dx`, exact when `F(x) e^{c^2 x^2}` is a polynomial of
    /// degree `<= 2n - 1`. Obtained by the substitution `x = z / c`.
    pub fn spatial_dilated(&self, c: f64) -> SpatialRule {
        SpatialRule {
            nodes: self.nodes.iter().map(|z| z / c).collect(),
            weights: self.scaled_weights.iter().map(|w| w / c).collect(),
        }
    }
}

/// Nodes and weights for unweighted integrals over the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SpatialRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Builds the `n`-point Gauss–Hermite rule.
pub fn gauss_hermite_rule(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::invalid("Gauss-Hermite rule needs n >= 1"));
    }
    if n == 1 {
        let w = std::f64::consts::PI.sqrt();
        return Ok(QuadratureRule {
            nodes: vec![0.0],
            weights: vec![w],
            scaled_weights: vec![w],
        });
    }

    // Jacobi matrix of the orthonormal recurrence: zero diagonal,
    // off-diagonal sqrt(k/2).
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(|a, b| a.total_cmp(b));

    // Newton: p_n' = sqrt(2n) p_{n-1}
    let dn = (2.0 * n as f64).sqrt();
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let step = poly_ratio(n, *x) / dn;
            if !step.is_finite() {
                break;
            }
            *x -= step;
            if step.abs() < 1e-16 * (1.0 + x.abs()) {
                break;
            }
        }
    }

    // exact symmetry
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let a = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -a;
        nodes[j] = a;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }

    let ln_n = (n as f64).ln();
    let mut weights = Vec::with_capacity(n);
    let mut scaled_weights = Vec::with_capacity(n);
    for &x in &nodes {
        let (_, lp) = log_abs_poly(n - 1, x);
        let ls = -ln_n - 2.0 * lp;
        weights.push(ls.exp());
        scaled_weights.push((ls + x * x).exp());
    }
    // mirror weights so the rule is exactly symmetric
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
        let s = 0.5 * (scaled_weights[i] + scaled_weights[j]);
        scaled_weights[i] = s;
        scaled_weights[j] = s;
    }

    Ok(QuadratureRule {
        nodes,
        weights,
        scaled_weights,
    })
}

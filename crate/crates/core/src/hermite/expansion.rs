//! Truncated Hermite expansions.
//!
//! Coefficients are indexed by the simplex `{alpha : |alpha| <= N}` in graded
//! lexicographic order: by total order first, then lexicographically
//! descending, e.g. for d = 2:
//! `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...`

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use super::functions::MultiIndex;
use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// The ordered index set of a degree-`N` expansion in `d` dimensions.
#[derive(Debug, PartialEq, Eq)]
pub struct HermiteBasis {
    dim: usize,
    degree: usize,
    indices: Vec<MultiIndex>,
    orders: Vec<usize>,
    lookup: HashMap<MultiIndex, usize>,
}

fn indices_of_order(dim: usize, order: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(dim: usize, remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if dim == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=remaining).rev() {
            prefix.push(first);
            rec(dim - 1, remaining - first, prefix, out);
            prefix.pop();
        }
    }
    rec(dim, order, &mut Vec::with_capacity(dim), out);
}

impl HermiteBasis {
    pub fn new(dim: usize, degree: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim, "1..=3"));
        }
        let mut raw = Vec::new();
        for k in 0..=degree {
            indices_of_order(dim, k, &mut raw);
        }
        let indices: Vec<MultiIndex> = raw.into_iter().map(MultiIndex::from).collect();
        let orders = indices.iter().map(MultiIndex::order).collect();
        let lookup = indices.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        Ok(HermiteBasis {
            dim,
            degree,
            indices,
            orders,
            lookup,
        })
    }

    pub fn shared(dim: usize, degree: usize) -> Result<Arc<Self>> {
        Self::new(dim, degree).map(Arc::new)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// `|alpha|` for every position.
    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    /// Number of multi-indices of total order exactly `k`.
    pub fn eigenspace_dim(&self, k: usize) -> usize {
        self.orders.iter().filter(|&&o| o == k).count()
    }
}

/// `f ~ sum_alpha c_alpha Phi_alpha`, truncated at total order `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteExpansion {
    basis: Arc<HermiteBasis>,
    coeffs: Vec<Complex64>,
}

impl HermiteExpansion {
    pub fn zeros(dim: usize, degree: usize) -> Result<Self> {
        let basis = HermiteBasis::shared(dim, degree)?;
        Ok(Self::zeros_on(basis))
    }

    pub fn zeros_on(basis: Arc<HermiteBasis>) -> Self {
        let coeffs = vec![Complex64::new(0.0, 0.0); basis.len()];
        HermiteExpansion { basis, coeffs }
    }

    pub fn from_coeffs(basis: Arc<HermiteBasis>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: coeffs.len(),
            });
        }
        Ok(HermiteExpansion { basis, coeffs })
    }

    /// A single basis function `Phi_alpha` in a degree-`degree` expansion.
    pub fn basis_function(alpha: &MultiIndex, degree: usize) -> Result<Self> {
        let mut e = Self::zeros(alpha.dim(), degree)?;
        e.set(alpha, Complex64::new(1.0, 0.0))?;
        Ok(e)
    }

    /// 1-D expansion from real coefficients `c_0, c_1, ...`.
    pub fn from_real_1d(coeffs: &[f64]) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("need at least one coefficient"));
        }
        let basis = HermiteBasis::shared(1, coeffs.len() - 1)?;
        Self::from_coeffs(basis, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn basis(&self) -> &Arc<HermiteBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim
    }

    pub fn degree(&self) -> usize {
        self.basis.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Option<Complex64> {
        self.basis.position(alpha).map(|i| self.coeffs[i])
    }

    pub fn set(&mut self, alpha: &MultiIndex, value: Complex64) -> Result<()> {
        let i = self
            .basis
            .position(alpha)
            .ok_or_else(|| Error::OutOfRange(format!("{alpha:?} not in degree-{} basis", self.degree())))?;
        self.coeffs[i] = value;
        Ok(())
    }

    /// Same coefficients re-indexed on a degree-`degree` simplex, padding with
    /// zeros or dropping orders above `degree`.
    pub fn with_degree(&self, degree: usize) -> Result<Self> {
        let basis = HermiteBasis::shared(self.dim(), degree)?;
        let mut out = Self::zeros_on(basis);
        for (alpha, c) in self.basis.indices.iter().zip(&self.coeffs) {
            if alpha.order() <= degree {
                out.set(alpha, *c)?;
            }
        }
        Ok(out)
    }

    /// `l^2` norm of the coefficients, i.e. the `L^2` norm of the truncated function.
    pub fn l2_norm(&self) -> f64 {
        // scaled so tiny coefficients do not underflow when squared
        let top = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if top == 0.0 || !top.is_finite() {
            return top;
        }
        top * self.coeffs.iter().map(|c| (c / top).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiply each coefficient by `factor(|alpha|)`.
    pub fn map_by_order(&self, factor: impl Fn(usize) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&self.basis.orders)
            .map(|(c, &k)| c * factor(k))
            .collect();
        HermiteExpansion {
            basis: self.basis.clone(),
            coeffs,
        }
    }

    /// `P_k`: keep exactly the coefficients with `|alpha| = k`.
    pub fn project(&self, k: usize) -> Result<Self> {
        if k > self.degree() {
            return Err(Error::OutOfRange(format!(
                "projection order {k} exceeds degree {}",
                self.degree()
            )));
        }
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        Ok(self.map_by_order(|o| if o == k { one } else { zero }))
    }

    /// Shubin–Sobolev norm `(sum_k (2k + d)^s ||P_k e||^2)^{1/2}`.
    pub fn shubin_norm(&self, s: f64) -> f64 {
        let d = self.dim() as f64;
        self.coeffs
            .iter()
            .zip(&self.basis.orders)
            .map(|(c, &k)| c.norm_sqr() * (2.0 * k as f64 + d).powf(s))
            .sum::<f64>()
            .sqrt()
    }

    fn check_same_basis(&self, other: &Self) -> Result<()> {
        if self.basis.dim != other.basis.dim || self.basis.degree != other.basis.degree {
            return Err(Error::invalid(format!(
                "expansions live on different bases: (d={}, N={}) vs (d={}, N={})",
                self.dim(),
                self.degree(),
                other.dim(),
                other.degree()
            )));
        }
        Ok(())
    }

    /// `self + a * other`
    pub fn axpy(&self, a: Complex64, other: &Self) -> Result<Self> {
        self.check_same_basis(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| x + a * y)
            .collect();
        Ok(HermiteExpansion {
            basis: self.basis.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn scale(&self, a: Complex64) -> Self {
        HermiteExpansion {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

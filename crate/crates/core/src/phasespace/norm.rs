use serde::{Deserialize, Serialize};

use super::grid::PhaseSpaceMatrix;
use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

/// Which variable is integrated first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormOrder {
    /// `L^p_x` inside, `L^q_xi` outside: modulation spaces.
    XInner,
    /// `L^p_xi` inside, `L^q_x` outside: Wiener amalgam spaces.
    XiInner,
}

/// Mixed quasi-norm selector; infinite exponents are `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    #[serde(with = "super::serde_exponent")]
    pub p: f64,
    #[serde(with = "super::serde_exponent")]
    pub q: f64,
    #[serde(default)]
    pub s: f64,
    pub order: NormOrder,
}

impl NormSpec {
    pub fn new(p: f64, q: f64, s: f64, order: NormOrder) -> Result<Self> {
        if !(p > 0.0) || !(q > 0.0) {
            return Err(Error::invalid(format!("exponents must be positive, got p={p}, q={q}")));
        }
        if !s.is_finite() {
            return Err(Error::invalid("weight exponent must be finite"));
        }
        Ok(NormSpec { p, q, s, order })
    }

    pub fn modulation(p: f64, q: f64, s: f64) -> Result<Self> {
        Self::new(p, q, s, NormOrder::XInner)
    }

    pub fn amalgam(p: f64, q: f64, s: f64) -> Result<Self> {
        Self::new(p, q, s, NormOrder::XiInner)
    }

    pub fn with_order(self, order: NormOrder) -> Self {
        NormSpec { order, ..self }
    }

    pub fn is_l2(&self) -> bool {
        self.p == 2.0 && self.q == 2.0 && self.s == 0.0
    }
}

/// Weighted `L^p` of nonnegative values; maxima for `p = inf`.
fn lp(values: &[f64], weights: &[f64], p: f64) -> f64 {
    let top = values.iter().copied().fold(0.0, f64::max);
    if p.is_infinite() || top == 0.0 {
        return top;
    }
    let terms: Vec<f64> = values.iter().zip(weights).map(|(&v, &w)| w * (v / top).powf(p)).collect();
    top * pairwise_sum(&terms).powf(1.0 / p)
}

/// Iterated Riemann-sum (trapezoid) norm of `|V| v_s`, with
/// `v_s(x, xi) = (1 + |x| + |xi|)^s`.
pub fn mixed_norm(m: &PhaseSpaceMatrix, spec: &NormSpec) -> f64 {
    let g = &m.grid;
    let nx = g.x_count();
    let nk = g.xi_count();
    let xa = g.x_axis();
    let ka = g.xi_axis();
    let xr: Vec<f64> = (0..nx).map(|i| g.x_point(i, &xa).iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let kr: Vec<f64> = (0..nk).map(|i| g.xi_point(i, &ka).iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let wx = g.x_volume_weights();
    let wk = g.xi_volume_weights();

    let amp = |ix: usize, ik: usize| {
        let v = m.values[ix * nk + ik].norm();
        if spec.s == 0.0 {
            v
        } else {
            v * (1.0 + xr[ix] + kr[ik]).powf(spec.s)
        }
    };

    match spec.order {
        NormOrder::XInner => {
            let inner: Vec<f64> = (0..nk)
                .map(|ik| {
                    let col: Vec<f64> = (0..nx).map(|ix| amp(ix, ik)).collect();
                    lp(&col, &wx, spec.p)
                })
                .collect();
            lp(&inner, &wk, spec.q)
        }
        NormOrder::XiInner => {
            let inner: Vec<f64> = (0..nx)
                .map(|ix| {
                    let row: Vec<f64> = (0..nk).map(|ik| amp(ix, ik)).collect();
                    lp(&row, &wk, spec.p)
                })
                .collect();
            lp(&inner, &wx, spec.q)
        }
    }
}

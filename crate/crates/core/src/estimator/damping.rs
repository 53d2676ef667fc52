//! The phase-space damping model `F_t(x, xi) = e^{-t (|x|^2 + |xi|^2)^β}`
//! in one dimension, whose `L^{p~,q~}` norm scales like `t^{-σ}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{geomspace, linear_fit, pairwise_sum};
use crate::semigroup::ExponentSet;

fn lp(values: &[f64], h: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().copied().fold(0.0, f64::max);
    }
    let terms: Vec<f64> = values.iter().map(|v| v.powf(p) * h).collect();
    pairwise_sum(&terms).powf(1.0 / p)
}

/// `|| ||F_t||_{L^p_x} ||_{L^q_xi}` on the uniform grid `j h`, `|j h| <= extent`.
pub fn damping_model_norm(t: f64, beta: f64, p: f64, q: f64, h: f64, extent: f64) -> Result<f64> {
    if !(t > 0.0 && beta > 0.0 && p > 0.0 && q > 0.0 && h > 0.0 && extent > 0.0) {
        return Err(Error::invalid("damping model needs positive parameters"));
    }
    let half = (extent / h).floor() as i64;
    let axis: Vec<f64> = (-half..=half).map(|j| j as f64 * h).collect();
    let inner: Vec<f64> = axis
        .par_iter()
        .map(|&xi| {
            let col: Vec<f64> = axis.iter().map(|&x| (-t * (x * x + xi * xi).powf(beta)).exp()).collect();
            lp(&col, h, p)
        })
        .collect();
    Ok(lp(&inner, h, q))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DampingFit {
    pub sigma: f64,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub slope: f64,
}

impl DampingFit {
    pub fn relative_error(&self) -> f64 {
        if self.sigma == 0.0 {
            self.slope.abs()
        } else {
            (self.slope + self.sigma).abs() / self.sigma
        }
    }
}

/// Log-log slope of `||F_t||_{L^{p~,q~}}` for `d = 1` over `n` geometric
/// times in `[t_min, 1]`. The grid reaches where `t_min r^{2β} = 40` with
/// step 0.1.
pub fn fit_damping_slope(beta: f64, x: &ExponentSet, t_min: f64, n: usize) -> Result<DampingFit> {
    let x = x.reduced();
    let (pt, qt) = (x.ptilde(), x.qtilde());
    let sigma = x.sigma(1, beta);
    let extent = (40.0 / t_min).powf(1.0 / (2.0 * beta));
    let times = geomspace(t_min, 1.0, n);
    let norms: Vec<f64> = times
        .iter()
        .map(|&t| damping_model_norm(t, beta, pt, qt, 0.1, extent))
        .collect::<Result<_>>()?;
    let lt: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ln: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let (slope, _) = linear_fit(&lt, &ln);
    Ok(DampingFit {
        sigma,
        times,
        norms,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn gaussian_closed_form() {
        // int int e^{-2t r^2} = pi / (2t)
        let v = damping_model_norm(0.5, 1.0, 2.0, 2.0, 0.1, 12.0).unwrap();
        assert!((v - (PI / 1.0).sqrt()).abs() < 1e-10);
        // sup_xi int e^{-t(x^2 + xi^2)} dx = sqrt(pi / t)
        let v = damping_model_norm(0.25, 1.0, 1.0, INF, 0.1, 15.0).unwrap();
        assert!((v - (PI / 0.25).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn slopes_match_sigma() {
        for beta in [1.0, 2.0] {
            for x in [ExponentSet::new(INF, INF, 2.0, 2.0).unwrap(), ExponentSet::new(INF, 1.0, 1.0, 1.0).unwrap()] {
                let fit = fit_damping_slope(beta, &x, 1e-2, 5).unwrap();
                assert!((fit.sigma - 1.0 / (2.0 * beta)).abs() < 1e-15);
                assert!(fit.relative_error() < 0.02, "beta={beta} slope={}", fit.slope);
            }
        }
    }
}

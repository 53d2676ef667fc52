//! Constant data: the potential-free equation against the Hermite flow.
//!
//! Without the potential, a spatially constant solution of
//! `u_t - Δu = λ|u|^{2k}u` solves the ODE `u' = λ|u|^{2k}u` and blows up at
//! `T* = 1/(2kλa^{2k})` however small `a` is.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{decay_monitor, picard_solve, SolveMode, SolverConfig};
use crate::error::{Error, Result};
use crate::hermite::{hermite_integral, synthesize, HermiteBasis, HermiteExpansion};
use crate::numeric::linspace;
use crate::phasespace::NormSpec;

/// Closed-form blow-up time of `u' = λ u^{2k+1}`, `u(0) = a`.
pub fn blowup_ode_oracle(a: f64, k: usize, lambda: f64) -> Result<f64> {
    if !(a > 0.0) || !(lambda > 0.0) || k == 0 {
        return Err(Error::invalid("blow-up oracle needs a > 0, lambda > 0, k >= 1"));
    }
    let k = k as f64;
    Ok(1.0 / (2.0 * k * lambda * a.powf(2.0 * k)))
}

/// Outcome of an explicit run of the constant-data ODE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupVerdict {
    pub blew_up: bool,
    pub t_star_numeric: Option<f64>,
    /// `None` when no blow-up is predicted (`a = 0`).
    pub t_star_ode: Option<f64>,
    pub relative_gap: Option<f64>,
    /// Time the run was allowed to reach.
    pub horizon: f64,
    pub steps: usize,
}

/// RK4 for `u' = λ|u|^{2k}u` with step `10^{-3} / (|λ| |u|^{2k})`, capped at
/// `10^{-3}`, until `|u| > threshold` or `t = horizon`.
pub fn integrate_free_ode(a: f64, k: usize, lambda: Complex64, threshold: f64, horizon: f64) -> Result<BlowupVerdict> {
    if !a.is_finite() || k == 0 || !(threshold > 0.0) || !(horizon > 0.0) {
        return Err(Error::invalid("free run needs finite a, k >= 1, positive threshold and horizon"));
    }
    let rhs = |u: Complex64| lambda * super::nonlinear::power(u, k);
    let t_star_ode = if a > 0.0 && lambda.im == 0.0 && lambda.re > 0.0 {
        Some(blowup_ode_oracle(a, k, lambda.re)?)
    } else {
        None
    };
    let mut u = Complex64::new(a, 0.0);
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut crossing = None;
    while t < horizon {
        let m = u.norm();
        if m > threshold {
            crossing = Some(t);
            break;
        }
        let rate = lambda.norm() * m.powi(2 * k as i32);
        let h = if rate > 0.0 { (1e-3 / rate).min(1e-3) } else { 1e-3 };
        let h = h.min(horizon - t);
        let k1 = rhs(u);
        let k2 = rhs(u + k1 * (h / 2.0));
        let k3 = rhs(u + k2 * (h / 2.0));
        let k4 = rhs(u + k3 * h);
        u += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        t += h;
        steps += 1;
        if !u.norm().is_finite() {
            crossing = Some(t);
            break;
        }
    }
    if crossing.is_none() && u.norm() > threshold {
        crossing = Some(t.min(horizon));
    }
    let relative_gap = match (crossing, t_star_ode) {
        (Some(n), Some(o)) => Some((n - o).abs() / o),
        _ => None,
    };
    Ok(BlowupVerdict {
        blew_up: crossing.is_some(),
        t_star_numeric: crossing,
        t_star_ode,
        relative_gap,
        horizon,
        steps,
    })
}

/// Degree-`N` Hermite truncation of the constant `a` in `d` dimensions:
/// `c_α = a ∏_i ∫ h_{α_i}`.
pub fn constant_datum(a: f64, dim: usize, degree: usize) -> Result<HermiteExpansion> {
    let basis = HermiteBasis::shared(dim, degree)?;
    let c = basis
        .indices()
        .iter()
        .map(|alpha| Complex64::new(a * alpha.entries().iter().map(|&n| hermite_integral(n)).product::<f64>(), 0.0))
        .collect();
    HermiteExpansion::from_coeffs(basis, c)
}

/// `max |a - P_N a|` over `[-1, 1]^d`.
fn truncation_error(a: f64, datum: &HermiteExpansion) -> Result<f64> {
    let axis = linspace(-1.0, 1.0, 41);
    let points: Vec<Vec<f64>> = match datum.dim() {
        1 => axis.iter().map(|&x| vec![x]).collect(),
        2 => axis.iter().flat_map(|&x| axis.iter().map(move |&y| vec![x, y])).collect(),
        _ => axis.iter().map(|&x| vec![x; datum.dim()]).collect(),
    };
    Ok(synthesize(datum, &points)?
        .iter()
        .map(|v| (v - a).norm())
        .fold(0.0, f64::max))
}

/// Outcome of the Hermite flow from truncated constant data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermiteVerdict {
    pub decayed: bool,
    /// `sup_t e^{t d^β} ||u(t)||_{M^{∞,1}}`; `None` if the run failed.
    pub x_estimate: Option<f64>,
    pub initial_norm: Option<f64>,
    pub final_norm: Option<f64>,
    pub mode: Option<SolveMode>,
    /// `max |a - P_N a|` on the unit cube.
    pub truncation_error: f64,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupContrast {
    pub a: f64,
    pub k: usize,
    pub free: BlowupVerdict,
    pub hermite: HermiteVerdict,
}

/// Runs both flows from the constant `a`. The free run is given at least
/// twice the predicted blow-up time; the Hermite run uses `cfg` as is and is
/// measured in `M^{∞,1}`, where constants live.
pub fn blowup_contrast(a: f64, cfg: &SolverConfig) -> Result<BlowupContrast> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::invalid("constant datum must be finite and non-negative"));
    }
    cfg.validate()?;
    let free_horizon = match (a > 0.0, cfg.lambda.im == 0.0 && cfg.lambda.re > 0.0) {
        (true, true) => cfg.horizon.max(2.0 * blowup_ode_oracle(a, cfg.k, cfg.lambda.re)?),
        _ => cfg.horizon,
    };
    let free = integrate_free_ode(a, cfg.k, cfg.lambda, cfg.blowup_threshold, free_horizon)?;

    let datum = constant_datum(a, cfg.d, cfg.degree)?;
    let truncation_error = truncation_error(a, &datum)?;
    let spec = NormSpec::modulation(f64::INFINITY, 1.0, 0.0)?;
    let hermite = match picard_solve(&datum, cfg, &spec) {
        Ok(sol) => {
            let x = decay_monitor(&sol.trajectory, cfg)?;
            let first = sol.trajectory.norms[0];
            let last = *sol.trajectory.norms.last().expect("non-empty");
            HermiteVerdict {
                decayed: x.is_finite() && last <= first,
                x_estimate: Some(x),
                initial_norm: Some(first),
                final_norm: Some(last),
                mode: Some(sol.report.mode),
                truncation_error,
                failure: None,
            }
        }
        Err(e @ (Error::Diverged { .. } | Error::NoConvergence { .. })) => HermiteVerdict {
            decayed: false,
            x_estimate: None,
            initial_norm: None,
            final_norm: None,
            mode: None,
            truncation_error,
            failure: Some(e.to_string()),
        },
        Err(e) => return Err(e),
    };
    Ok(BlowupContrast {
        a,
        k: cfg.k,
        free,
        hermite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_examples() {
        assert_eq!(blowup_ode_oracle(1.0, 1, 1.0).unwrap(), 0.5);
        assert_eq!(blowup_ode_oracle(2.0, 1, 1.0).unwrap(), 0.125);
        assert!(blowup_ode_oracle(1e-3, 1, 1.0).unwrap() > 1e5);
        assert!(blowup_ode_oracle(0.0, 1, 1.0).is_err());
        assert!(blowup_ode_oracle(1.0, 1, -1.0).is_err());
    }

    #[test]
    fn free_run_hits_oracle() {
        for (a, k) in [(1.0, 1), (2.0, 1), (1.0, 2), (0.3, 1)] {
            let v = integrate_free_ode(a, k, Complex64::new(1.0, 0.0), 1e8, 100.0).unwrap();
            assert!(v.blew_up);
            assert!(v.relative_gap.unwrap() < 0.05, "a={a} k={k} {v:?}");
            assert!(v.t_star_numeric.unwrap() <= v.horizon);
        }
    }

    #[test]
    fn free_run_zero_and_defocusing() {
        let v = integrate_free_ode(0.0, 1, Complex64::new(1.0, 0.0), 1e8, 1.0).unwrap();
        assert!(!v.blew_up && v.t_star_ode.is_none());
        let v = integrate_free_ode(1.0, 1, Complex64::new(-1.0, 0.0), 1e8, 1.0).unwrap();
        assert!(!v.blew_up);
    }

    #[test]
    fn constant_datum_approximates_one() {
        let e = constant_datum(1.0, 1, 24).unwrap();
        // slow, roughly N^{-1/2}, convergence of P_N 1
        let errs: Vec<f64> = [8, 24, 96]
            .iter()
            .map(|&n| truncation_error(1.0, &constant_datum(1.0, 1, n).unwrap()).unwrap())
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2] && errs[2] < 0.06, "{errs:?}");
        assert!(e.coeffs().iter().skip(1).step_by(2).all(|c| c.norm() == 0.0));
        let e2 = constant_datum(1.0, 2, 8).unwrap();
        let pos = e2.basis().position(&crate::hermite::MultiIndex::new(vec![2, 4]).unwrap()).unwrap();
        let one = constant_datum(1.0, 1, 8).unwrap();
        assert_eq!(e2.coeffs()[pos], one.coeffs()[2] * one.coeffs()[4]);
    }

    #[test]
    fn contrast_small_and_zero() {
        let cfg = SolverConfig { degree: 12, horizon: 2.0, ..Default::default() };
        let c = blowup_contrast(0.05, &cfg).unwrap();
        assert!(c.free.blew_up);
        assert!(c.free.relative_gap.unwrap() < 0.05);
        assert!(c.hermite.decayed, "{:?}", c.hermite);
        assert!(c.hermite.x_estimate.unwrap().is_finite());

        let z = blowup_contrast(0.0, &cfg).unwrap();
        assert!(!z.free.blew_up);
        assert_eq!(z.hermite.x_estimate, Some(0.0));
    }
}

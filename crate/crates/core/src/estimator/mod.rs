//! Measured decay of `||e^{-tH^β} f||_{M^{p2,q2}} / ||f||_{M^{p1,q1}}` and
//! fits against the two regimes of `C(t)`.

pub mod corpus;
mod damping;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::HermiteExpansion;
use crate::numeric::{geomspace, linear_fit, linspace};
use crate::phasespace::{mixed_norm, ExpansionStft, NormOrder, NormSpec, PhaseSpaceGrid, Window};
use crate::semigroup::{apply_semigroup, theoretical_constant, ExponentSet, FlowParams};

pub use corpus::{corpus, stress_family, CorpusEntry};
pub use damping::{damping_model_norm, fit_damping_slope, DampingFit};

/// Ratios below this fraction of the first one are left out of rate fits.
pub const RATIO_FLOOR: f64 = 1e-12;

/// Phase-space norms of expansions up to a fixed degree on a fixed grid,
/// with the STFT tables built once.
#[derive(Debug, Clone)]
pub struct NormEvaluator {
    tables: ExpansionStft,
}

impl NormEvaluator {
    pub fn new(grid: PhaseSpaceGrid, window: Window, degree: usize) -> Result<Self> {
        Ok(NormEvaluator {
            tables: ExpansionStft::new(grid, window, degree)?,
        })
    }

    /// Default grid for `degree` and the Gaussian window.
    pub fn for_degree(dim: usize, degree: usize) -> Result<Self> {
        let w = Window::gaussian();
        Self::new(PhaseSpaceGrid::for_degree(dim, degree, &w)?, w, degree)
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        self.tables.grid()
    }

    pub fn window(&self) -> &Window {
        self.tables.window()
    }

    pub fn degree(&self) -> usize {
        self.tables.degree()
    }

    pub fn norm(&self, e: &HermiteExpansion, spec: &NormSpec) -> Result<f64> {
        let v = if spec.is_l2() {
            self.tables.l2_norm(e)?
        } else {
            mixed_norm(&self.tables.apply(e)?, spec)
        };
        if !v.is_finite() {
            return Err(Error::NonFinite("phase-space norm".into()));
        }
        Ok(v)
    }

    /// `M^{p,q}` norm with `s = 0`.
    pub fn modulation(&self, e: &HermiteExpansion, p: f64, q: f64) -> Result<f64> {
        self.norm(e, &NormSpec::new(p, q, 0.0, NormOrder::XInner)?)
    }

    pub fn ratio(&self, f: &HermiteExpansion, params: &FlowParams, x: &ExponentSet) -> Result<f64> {
        let den = self.modulation(f, x.p1, x.q1)?;
        if den == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let num = self.modulation(&apply_semigroup(f, params)?, x.p2, x.q2)?;
        Ok(num / den)
    }

    /// Ratios at each time, computed in parallel and returned in input order.
    pub fn ratios(&self, f: &HermiteExpansion, beta: f64, x: &ExponentSet, times: &[f64]) -> Result<Vec<f64>> {
        let den = self.modulation(f, x.p1, x.q1)?;
        if den == 0.0 {
            return Err(Error::ZeroNorm);
        }
        times
            .par_iter()
            .map(|&t| {
                let p = FlowParams::new(beta, t, f.dim())?;
                Ok(self.modulation(&apply_semigroup(f, &p)?, x.p2, x.q2)? / den)
            })
            .collect()
    }
}

/// One-shot ratio on a given grid and window.
pub fn measure_ratio(
    f: &HermiteExpansion,
    params: &FlowParams,
    x: &ExponentSet,
    grid: &PhaseSpaceGrid,
    window: &Window,
) -> Result<f64> {
    NormEvaluator::new(grid.clone(), window.clone(), f.degree())?.ratio(f, params, x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargeTimeFit {
    pub times: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Number of leading samples used in the fit.
    pub used: usize,
    pub rate: f64,
    pub intercept: f64,
}

/// Least-squares slope of `log ratio` over `n` arithmetic times in
/// `[1, t_max]`; the rate is minus that slope.
pub fn fit_large_time(
    f: &HermiteExpansion,
    beta: f64,
    x: &ExponentSet,
    t_max: f64,
    n: usize,
    eval: &NormEvaluator,
) -> Result<LargeTimeFit> {
    if n < 5 {
        return Err(Error::invalid(format!("large-time fit needs at least 5 samples, got {n}")));
    }
    if !(t_max > 1.0) {
        return Err(Error::invalid("t_max must exceed 1"));
    }
    let times = linspace(1.0, t_max, n);
    let ratios = eval.ratios(f, beta, x, &times)?;
    fit_log_linear(times, ratios)
}

fn fit_log_linear(times: Vec<f64>, ratios: Vec<f64>) -> Result<LargeTimeFit> {
    let floor = RATIO_FLOOR * ratios[0];
    let used = ratios.iter().take_while(|&&r| r > floor && r.is_finite()).count();
    if used < 2 {
        let t = times.get(used).copied().unwrap_or(times[0]);
        return Err(Error::Underflow(t));
    }
    let logs: Vec<f64> = ratios[..used].iter().map(|r| r.ln()).collect();
    let (slope, intercept) = linear_fit(&times[..used], &logs);
    Ok(LargeTimeFit {
        times,
        ratios,
        used,
        rate: -slope,
        intercept,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallTimeFit {
    pub sigma: f64,
    pub times: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `sup_t t^σ ratio(t)`
    pub sup_scaled: f64,
    /// Log-log slope of the ratio.
    pub slope: f64,
}

impl SmallTimeFit {
    /// The estimate is an upper bound, so only slopes steeper than `-σ`
    /// (beyond a tolerance) contradict it.
    pub fn consistent(&self, tol: f64) -> bool {
        self.sup_scaled.is_finite() && self.slope >= -self.sigma - tol
    }
}

/// Geometric sweep over `[t_min, 1]` after reducing the target exponents.
pub fn fit_small_time(
    f: &HermiteExpansion,
    beta: f64,
    x: &ExponentSet,
    t_min: f64,
    n: usize,
    eval: &NormEvaluator,
) -> Result<SmallTimeFit> {
    if n < 2 || !(t_min > 0.0 && t_min < 1.0) {
        return Err(Error::invalid("small-time sweep needs n >= 2 and 0 < t_min < 1"));
    }
    let x = x.reduced();
    let sigma = x.sigma(f.dim(), beta);
    let times = geomspace(t_min, 1.0, n);
    let ratios = eval.ratios(f, beta, &x, &times)?;
    if ratios.iter().any(|r| !r.is_finite()) {
        return Err(Error::NonFinite("small-time ratio".into()));
    }
    let sup_scaled = times
        .iter()
        .zip(&ratios)
        .map(|(t, r)| t.powf(sigma) * r)
        .fold(0.0, f64::max);
    let lt: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let lr: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let (slope, _) = linear_fit(&lt, &lr);
    Ok(SmallTimeFit {
        sigma,
        times,
        ratios,
        sup_scaled,
        slope,
    })
}

/// Ratios against `C(t)` with `C0 = 1` over a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub exponents: ExponentSet,
    pub beta: f64,
    pub d: usize,
    pub times: Vec<f64>,
    pub ratios: Vec<f64>,
    pub theory: Vec<f64>,
    pub fitted_large_time_rate: Option<f64>,
    pub fitted_small_time_slope: Option<f64>,
    /// `sup_t ratio(t) / C(t)`, the fitted `C0`.
    pub sup_bounded_constant: f64,
}

impl DecayReport {
    /// Rows `(t, ratio, theory, ratio/theory)`.
    pub fn rows(&self) -> Vec<[f64; 4]> {
        self.times
            .iter()
            .zip(&self.ratios)
            .zip(&self.theory)
            .map(|((&t, &r), &c)| [t, r, c, r / c])
            .collect()
    }
}

/// Ratios at the given positive times, fits on whichever regimes have
/// enough samples (5 for `t >= 1`, 2 for `t <= 1`).
pub fn decay_report(
    f: &HermiteExpansion,
    beta: f64,
    x: &ExponentSet,
    times: &[f64],
    eval: &NormEvaluator,
) -> Result<DecayReport> {
    if times.is_empty() || times.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::invalid("decay sweep needs positive times"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("decay times must be increasing"));
    }
    let d = f.dim();
    let ratios = eval.ratios(f, beta, x, times)?;
    let theory: Vec<f64> = times
        .iter()
        .map(|&t| theoretical_constant(&FlowParams::new(beta, t, d)?, x, 1.0))
        .collect::<Result<_>>()?;
    let sup = ratios.iter().zip(&theory).map(|(r, c)| r / c).fold(0.0, f64::max);

    let large: Vec<usize> = (0..times.len()).filter(|&i| times[i] >= 1.0).collect();
    let fitted_large_time_rate = if large.len() >= 5 {
        let ts = large.iter().map(|&i| times[i]).collect();
        let rs = large.iter().map(|&i| ratios[i]).collect();
        Some(fit_log_linear(ts, rs)?.rate)
    } else {
        None
    };
    let small: Vec<usize> = (0..times.len()).filter(|&i| times[i] <= 1.0).collect();
    let fitted_small_time_slope = if small.len() >= 2 {
        let lt: Vec<f64> = small.iter().map(|&i| times[i].ln()).collect();
        let lr: Vec<f64> = small.iter().map(|&i| ratios[i].ln()).collect();
        Some(linear_fit(&lt, &lr).0)
    } else {
        None
    };
    Ok(DecayReport {
        exponents: *x,
        beta,
        d,
        times: times.to_vec(),
        ratios,
        theory,
        fitted_large_time_rate,
        fitted_small_time_slope,
        sup_bounded_constant: sup,
    })
}

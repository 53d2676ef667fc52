//! `∂_t u + H^β u = λ |u|^{2k} u` in Duhamel form
//!
//! ```text
//! J(u)(t) = S(t) u0 + ∫_0^t S(t - τ) λ |u|^{2k} u (τ) dτ,   S(t) = e^{-tH^β}
//! ```
//!
//! The integral is a composite trapezoid on a uniform mesh with the
//! semigroup factors applied exactly, and the fixed point is found by
//! Picard iteration over the whole horizon.

mod blowup;
mod nonlinear;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::NormEvaluator;
use crate::hermite::HermiteExpansion;
use crate::phasespace::NormSpec;
use crate::semigroup::{decay_factor, eigenvalue};

pub use blowup::{
    blowup_contrast, blowup_ode_oracle, constant_datum, integrate_free_ode, BlowupContrast, BlowupVerdict,
    HermiteVerdict,
};
pub use nonlinear::{nonlinearity, required_order, Nonlinearity};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub beta: f64,
    pub lambda: Complex64,
    pub k: usize,
    pub d: usize,
    /// Truncation degree `N`.
    pub degree: usize,
    pub dt: f64,
    /// Horizon `T`.
    pub horizon: f64,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    /// Smallness radius for `||u0||_{M^{p,q}}`; above it the solver marches.
    pub eps: f64,
    pub blowup_threshold: f64,
    /// Run exponent pairs outside the global theory.
    pub allow_out_of_theory: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            beta: 1.0,
            lambda: Complex64::new(1.0, 0.0),
            k: 1,
            d: 1,
            degree: 16,
            dt: 0.05,
            horizon: 4.0,
            picard_tol: 1e-12,
            picard_max_iters: 50,
            eps: 0.1,
            blowup_threshold: 1e8,
            allow_out_of_theory: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid("beta must be positive"));
        }
        if self.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if self.d == 0 || self.d > 2 {
            return Err(Error::UnsupportedDimension(self.d, "1 or 2"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt must be positive"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::invalid("horizon must be positive"));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::invalid("picard_tol must be positive"));
        }
        if self.picard_max_iters == 0 {
            return Err(Error::invalid("picard_max_iters must be positive"));
        }
        if !(self.eps > 0.0) {
            return Err(Error::invalid("eps must be positive"));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(Error::invalid("blowup_threshold must be positive"));
        }
        if !(self.lambda.re.is_finite() && self.lambda.im.is_finite()) {
            return Err(Error::invalid("lambda must be finite"));
        }
        Ok(())
    }

    /// Exponent hypotheses of the global theory for `M^{p,q}`:
    /// `p, q >= 1`, `q <= (2k+1)/(2k)` and `1/q + β/(kd) > 1`.
    pub fn check_admissible(&self, p: f64, q: f64) -> Result<()> {
        if p < 1.0 || q < 1.0 {
            return Err(Error::Inadmissible(format!(
                "p = {p}, q = {q}: the solver needs p, q >= 1"
            )));
        }
        if self.allow_out_of_theory {
            return Ok(());
        }
        let k = self.k as f64;
        let qmax = (2.0 * k + 1.0) / (2.0 * k);
        if q > qmax {
            return Err(Error::Inadmissible(format!(
                "q = {q} violates q <= (2k+1)/(2k) = {qmax} for k = {}",
                self.k
            )));
        }
        let lhs = 1.0 / q + self.beta / (k * self.d as f64);
        if lhs <= 1.0 {
            return Err(Error::Inadmissible(format!(
                "1/q + beta/(kd) = {lhs} must exceed 1"
            )));
        }
        Ok(())
    }

    /// Uniform mesh `0, h, ..., T` with `h <= dt`.
    pub fn mesh(&self) -> Vec<f64> {
        let n = ((self.horizon / self.dt) - 1e-9).ceil().max(1.0) as usize;
        let h = self.horizon / n as f64;
        (0..=n).map(|i| if i == n { self.horizon } else { i as f64 * h }).collect()
    }

    pub fn bottom_eigenvalue(&self) -> f64 {
        eigenvalue(0, self.d, self.beta)
    }
}

/// Mesh values of a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<HermiteExpansion>,
    /// `||u(t)||` in the solver's norm; empty until measured.
    pub norms: Vec<f64>,
    /// Running `sup_{s <= t} e^{s d^β} ||u(s)||`.
    pub xnorm_running: Vec<f64>,
}

impl Trajectory {
    fn bare(times: Vec<f64>, states: Vec<HermiteExpansion>) -> Self {
        Trajectory {
            times,
            states,
            norms: Vec::new(),
            xnorm_running: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &HermiteExpansion {
        self.states.last().expect("non-empty trajectory")
    }

    /// Fills `norms` and `xnorm_running`.
    pub fn measure(&mut self, eval: &NormEvaluator, spec: &NormSpec, bottom: f64) -> Result<()> {
        self.norms = self.states.iter().map(|s| eval.norm(s, spec)).collect::<Result<_>>()?;
        let mut run = 0.0f64;
        self.xnorm_running = self
            .times
            .iter()
            .zip(&self.norms)
            .map(|(&t, &n)| {
                run = run.max((t * bottom).exp() * n);
                run
            })
            .collect();
        Ok(())
    }

    /// Rows `(t, norm, e^{t d^β} norm)`.
    pub fn rows(&self, bottom: f64) -> Vec<[f64; 3]> {
        self.times
            .iter()
            .zip(&self.norms)
            .map(|(&t, &n)| [t, n, (t * bottom).exp() * n])
            .collect()
    }
}

/// Linear flow `S(t) u0` on the mesh.
pub fn linear_flow(u0: &HermiteExpansion, beta: f64, times: &[f64]) -> Vec<HermiteExpansion> {
    let d = u0.dim();
    times
        .iter()
        .map(|&t| u0.map_by_order(|k| Complex64::new(decay_factor(k, d, beta, t), 0.0)))
        .collect()
}

/// `J(u)` on the mesh of `u`. Uses the recursion
/// `I_{n+1} = S(h) I_n + h/2 (S(h) N_n + N_{n+1})`, which is the composite
/// trapezoid rule with exact semigroup factors.
pub fn duhamel_map(
    u: &[HermiteExpansion],
    u0: &HermiteExpansion,
    times: &[f64],
    cfg: &SolverConfig,
    nl: &Nonlinearity,
) -> Result<Vec<HermiteExpansion>> {
    if u.len() != times.len() || times.is_empty() {
        return Err(Error::invalid("trajectory and mesh lengths differ"));
    }
    let linear = linear_flow(u0, cfg.beta, times);
    if cfg.lambda == Complex64::new(0.0, 0.0) {
        return Ok(linear);
    }
    let nonlin: Vec<HermiteExpansion> = u.iter().map(|s| nl.apply(s, cfg.lambda)).collect::<Result<_>>()?;
    let d = u0.dim();
    let mut out = Vec::with_capacity(times.len());
    let mut integral = HermiteExpansion::zeros_on(u0.basis().clone());
    out.push(linear[0].clone());
    for n in 0..times.len() - 1 {
        let h = times[n + 1] - times[n];
        let step = |e: &HermiteExpansion| e.map_by_order(|k| Complex64::new(decay_factor(k, d, cfg.beta, h), 0.0));
        let half = Complex64::new(0.5 * h, 0.0);
        integral = step(&integral)
            .axpy(half, &step(&nonlin[n]))?
            .axpy(half, &nonlin[n + 1])?;
        let next = linear[n + 1].add(&integral)?;
        if !next.is_finite() {
            return Err(Error::Diverged {
                time: times[n + 1],
                reason: "non-finite Duhamel integral".into(),
            });
        }
        out.push(next);
    }
    Ok(out)
}

/// Whether the fixed point was found on the whole horizon at once or by
/// marching over sub-horizons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    Global,
    Local,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub mode: SolveMode,
    pub iterations: usize,
    /// `sup_t ||u_{n+1}(t) - u_n(t)||` per iteration.
    pub differences: Vec<f64>,
    /// Successive quotients of `differences`.
    pub contraction_ratios: Vec<f64>,
    /// `sup_t ||J(u) - u||` at the returned solution.
    pub residual: f64,
    pub initial_norm: f64,
    /// `sup_t ||u(t)||`
    pub max_norm: f64,
    /// Sub-horizon length used in local mode.
    pub sub_horizon: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub trajectory: Trajectory,
    pub report: PicardReport,
}

struct Solver<'a> {
    cfg: &'a SolverConfig,
    spec: NormSpec,
    eval: NormEvaluator,
    nl: Nonlinearity,
}

impl Solver<'_> {
    fn sup_diff(&self, a: &[HermiteExpansion], b: &[HermiteExpansion]) -> Result<f64> {
        let mut m = 0.0f64;
        for (x, y) in a.iter().zip(b) {
            m = m.max(self.eval.norm(&x.sub(y)?, &self.spec)?);
        }
        Ok(m)
    }

    fn check_bounded(&self, u: &[HermiteExpansion], times: &[f64]) -> Result<()> {
        for (s, &t) in u.iter().zip(times) {
            let n = s.l2_norm();
            if !n.is_finite() || n > self.cfg.blowup_threshold {
                return Err(Error::Diverged {
                    time: t,
                    reason: format!("L2 norm {n:e} beyond threshold"),
                });
            }
        }
        Ok(())
    }

    /// Picard iteration on one mesh. Returns the iterate, differences and
    /// residual.
    fn picard(&self, u0: &HermiteExpansion, times: &[f64]) -> Result<(Vec<HermiteExpansion>, Vec<f64>, f64)> {
        let mut u = linear_flow(u0, self.cfg.beta, times);
        let mut diffs = Vec::new();
        for _ in 0..self.cfg.picard_max_iters {
            let next = duhamel_map(&u, u0, times, self.cfg, &self.nl)?;
            self.check_bounded(&next, times)?;
            let diff = self.sup_diff(&next, &u)?;
            diffs.push(diff);
            u = next;
            if diff < self.cfg.picard_tol {
                let check = duhamel_map(&u, u0, times, self.cfg, &self.nl)?;
                let residual = self.sup_diff(&check, &u)?;
                return Ok((u, diffs, residual));
            }
            if diffs.len() >= 3 && diff > 1e3 * diffs[0] {
                break;
            }
        }
        Err(Error::NoConvergence {
            iterations: diffs.len(),
            last_difference: diffs.last().copied().unwrap_or(f64::NAN),
        })
    }
}

const MAX_HALVINGS: usize = 6;

/// Fixed point of `J` on the configured mesh, in the norm `spec`.
///
/// If `||u0||` exceeds `cfg.eps` the horizon is covered by consecutive
/// sub-horizons, each solved by Picard iteration; a failing sub-horizon is
/// halved up to six times.
pub fn picard_solve(u0: &HermiteExpansion, cfg: &SolverConfig, spec: &NormSpec) -> Result<Solution> {
    let eval = NormEvaluator::for_degree(cfg.d, cfg.degree)?;
    picard_solve_with(u0, cfg, spec, &eval)
}

/// As `picard_solve`, reusing prebuilt norm tables.
pub fn picard_solve_with(u0: &HermiteExpansion, cfg: &SolverConfig, spec: &NormSpec, eval: &NormEvaluator) -> Result<Solution> {
    cfg.validate()?;
    cfg.check_admissible(spec.p, spec.q)?;
    if u0.dim() != cfg.d {
        return Err(Error::DimensionMismatch {
            expected: cfg.d,
            got: u0.dim(),
        });
    }
    if u0.degree() != cfg.degree {
        return Err(Error::invalid(format!(
            "initial datum has degree {}, config expects {}",
            u0.degree(),
            cfg.degree
        )));
    }
    if eval.degree() < cfg.degree || eval.grid().dim != cfg.d {
        return Err(Error::invalid("norm tables do not match the configuration"));
    }
    let solver = Solver {
        cfg,
        spec: *spec,
        eval: eval.clone(),
        nl: Nonlinearity::new(cfg.d, cfg.degree, cfg.k)?,
    };
    let initial_norm = solver.eval.norm(u0, spec)?;
    let mesh = cfg.mesh();

    let (states, diffs, residual, mode, sub) = if initial_norm <= cfg.eps {
        let (u, diffs, residual) = solver.picard(u0, &mesh)?;
        (u, diffs, residual, SolveMode::Global, None)
    } else {
        let (u, diffs, residual, steps) = march(&solver, u0, &mesh)?;
        let sub = steps as f64 * (mesh[1] - mesh[0]);
        (u, diffs, residual, SolveMode::Local, Some(sub))
    };

    let mut trajectory = Trajectory::bare(mesh, states);
    trajectory.measure(&solver.eval, spec, cfg.bottom_eigenvalue())?;
    let max_norm = trajectory.norms.iter().copied().fold(0.0, f64::max);
    let contraction_ratios = diffs.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(Solution {
        report: PicardReport {
            mode,
            iterations: diffs.len(),
            differences: diffs,
            contraction_ratios,
            residual,
            initial_norm,
            max_norm,
            sub_horizon: sub,
        },
        trajectory,
    })
}

type Marched = (Vec<HermiteExpansion>, Vec<f64>, f64, usize);

fn march(solver: &Solver<'_>, u0: &HermiteExpansion, mesh: &[f64]) -> Result<Marched> {
    let total = mesh.len() - 1;
    let mut steps = total;
    let mut halvings = 0;
    let mut start = 0usize;
    let mut states = vec![u0.clone()];
    let mut all_diffs = Vec::new();
    let mut residual = 0.0f64;
    while start < total {
        let end = (start + steps).min(total);
        let t0 = mesh[start];
        let local: Vec<f64> = mesh[start..=end].iter().map(|t| t - t0).collect();
        let init = states.last().expect("non-empty").clone();
        match solver.picard(&init, &local) {
            Ok((u, diffs, r)) => {
                states.extend(u.into_iter().skip(1));
                all_diffs.extend(diffs);
                residual = residual.max(r);
                start = end;
            }
            Err(e @ (Error::NoConvergence { .. } | Error::Diverged { .. })) => {
                if halvings == MAX_HALVINGS || steps == 1 {
                    return Err(match e {
                        Error::Diverged { reason, .. } => Error::Diverged { time: t0, reason },
                        other => other,
                    });
                }
                halvings += 1;
                steps = (steps / 2).max(1);
            }
            Err(e) => return Err(e),
        }
    }
    Ok((states, all_diffs, residual, steps))
}

/// `sup_t e^{t d^β} ||u(t)||` over the mesh.
pub fn decay_monitor(tr: &Trajectory, cfg: &SolverConfig) -> Result<f64> {
    if tr.norms.len() != tr.times.len() {
        return Err(Error::invalid("trajectory norms were not measured"));
    }
    let bottom = cfg.bottom_eigenvalue();
    Ok(tr
        .times
        .iter()
        .zip(&tr.norms)
        .map(|(&t, &n)| (t * bottom).exp() * n)
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsCalibration {
    /// Largest tested datum norm that decayed.
    pub eps: f64,
    /// Smallest tested datum norm that did not.
    pub upper: f64,
    pub bisections: usize,
}

/// Bisection on the amplitude `a` of `u0 = a * profile` for the boundary
/// between runs that converge globally with `X <= growth * ||u0||` and runs
/// that do not. Returns norms of the bracketing data.
pub fn calibrate_eps(
    profile: &HermiteExpansion,
    cfg: &SolverConfig,
    spec: &NormSpec,
    mut lo: f64,
    mut hi: f64,
    bisections: usize,
    growth: f64,
) -> Result<EpsCalibration> {
    let eval = NormEvaluator::for_degree(cfg.d, cfg.degree)?;
    let base = eval.norm(profile, spec)?;
    if base == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let mut forced = cfg.clone();
    forced.eps = f64::INFINITY;
    let decays = |a: f64| -> Result<bool> {
        let u0 = profile.scale(Complex64::new(a, 0.0));
        match picard_solve_with(&u0, &forced, spec, &eval) {
            Ok(sol) => Ok(decay_monitor(&sol.trajectory, &forced)? <= growth * a * base),
            Err(Error::NoConvergence { .. } | Error::Diverged { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    if !decays(lo)? {
        return Err(Error::invalid(format!("lower amplitude {lo} already fails")));
    }
    if decays(hi)? {
        return Err(Error::invalid(format!("upper amplitude {hi} still decays")));
    }
    for _ in 0..bisections {
        let mid = 0.5 * (lo + hi);
        if decays(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(EpsCalibration {
        eps: lo * base,
        upper: hi * base,
        bisections,
    })
}

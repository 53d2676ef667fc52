//! Executes a validated configuration and writes its artifacts.

use std::path::Path;
use std::time::Instant;

use hermheat::estimator::{decay_report, fit_damping_slope, fit_small_time, stress_family, NormEvaluator};
use hermheat::hermite::io::{expansion_to_bytes, ExpansionRecord};
use hermheat::hermite::{gauss_hermite_rule, HermiteExpansion, SpectralGrid};
use hermheat::numeric::{geomspace, linspace};
use hermheat::phasespace::{
    mixed_norm, stft, write_matrix, write_matrix_csv, NormOrder, NormRecord, NormSpec, PhaseSpaceGrid, Window,
};
use hermheat::semigroup::{apply_semigroup, eigenvalue, mehler_apply, ExponentSet, FlowParams};
use hermheat::solver::{blowup_contrast, decay_monitor, picard_solve_with, SolverConfig};
use hermheat::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::artifacts::{Artifact, ArtifactWriter, Cell};
use crate::config::{
    emit, BlowupParams, Command, ConfigError, DecayParams, Exponents, ExperimentConfig, NormEntry, NormParams, Order,
    SemigroupParams, SmoothingParams, SolveParams, Spacing, TransformParams,
};
use crate::signal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
    Io,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct RunError {
    pub kind: ErrorKind,
    pub message: String,
}

impl RunError {
    pub fn validation(message: impl Into<String>) -> Self {
        RunError {
            kind: ErrorKind::Validation,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Validation => 2,
            ErrorKind::Numerical => 3,
            ErrorKind::Io => 4,
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::validation(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError {
            kind: ErrorKind::Io,
            message: e.to_string(),
        }
    }
}

impl From<hermheat::Error> for RunError {
    fn from(e: hermheat::Error) -> Self {
        use hermheat::Error as E;
        let kind = match &e {
            E::InvalidArgument(_)
            | E::DimensionMismatch { .. }
            | E::UnsupportedDimension(..)
            | E::InsufficientOrder { .. }
            | E::OutOfRange(_)
            | E::ZeroWindow
            | E::GridTooCoarse { .. }
            | E::Inadmissible(_) => ErrorKind::Validation,
            E::ZeroNorm | E::NonFinite(_) | E::Underflow(_) | E::NoConvergence { .. } | E::Diverged { .. } => {
                ErrorKind::Numerical
            }
            E::Format(_) | E::Io(_) | E::Json(_) => ErrorKind::Io,
        };
        RunError {
            kind,
            message: e.to_string(),
        }
    }
}

type Result<T> = std::result::Result<T, RunError>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(RunError::validation(msg()))
    }
}

fn check_dim(d: usize, max: usize) -> Result<()> {
    ensure((1..=max).contains(&d), || format!("d = {d} is not supported here (1..={max})"))
}

fn check_degree(degree: usize) -> Result<()> {
    ensure(degree <= 256, || format!("degree {degree} exceeds the supported 256"))
}

fn check_beta(beta: f64) -> Result<()> {
    ensure(beta > 0.0 && beta.is_finite(), || format!("beta must be positive and finite, got {beta}"))
}

fn check_signal(s: &crate::config::SignalSpec, d: usize, degree: usize) -> Result<()> {
    signal::check(s, d, degree).map_err(RunError::validation)
}

fn parse_window(label: &str) -> Result<Window> {
    if label == "gauss" {
        return Ok(Window::gaussian());
    }
    let n = label
        .strip_prefix("hermite")
        .and_then(|n| n.parse::<usize>().ok())
        .ok_or_else(|| RunError::validation(format!("unknown window {label:?}; use \"gauss\" or \"hermiteN\"")))?;
    Ok(Window::hermite(n)?)
}

fn norm_spec(n: &NormEntry) -> Result<NormSpec> {
    let order = match n.order {
        Order::XInner => NormOrder::XInner,
        Order::XiInner => NormOrder::XiInner,
    };
    Ok(NormSpec::new(n.p, n.q, n.s, order)?)
}

fn exponent_set(x: &Exponents) -> Result<ExponentSet> {
    Ok(ExponentSet::new(x.p1, x.q1, x.p2, x.q2)?)
}

fn decay_times(p: &DecayParams) -> Vec<f64> {
    match p.spacing {
        Spacing::Linear => linspace(p.t_start, p.t_end, p.samples),
        Spacing::Geometric => geomspace(p.t_start, p.t_end, p.samples),
    }
}

fn solver_config(p: &SolveParams) -> SolverConfig {
    SolverConfig {
        beta: p.beta,
        lambda: Complex64::new(p.lambda_re, p.lambda_im),
        k: p.k,
        d: p.d,
        degree: p.degree,
        dt: p.dt,
        horizon: p.horizon,
        picard_tol: p.picard_tol,
        picard_max_iters: p.picard_max_iters,
        eps: p.eps,
        blowup_threshold: p.blowup_threshold,
        allow_out_of_theory: p.allow_out_of_theory,
    }
}

fn blowup_solver_config(p: &BlowupParams) -> SolverConfig {
    SolverConfig {
        beta: p.beta,
        lambda: Complex64::new(p.lambda, 0.0),
        k: p.k,
        d: p.d,
        degree: p.degree,
        dt: p.dt,
        horizon: p.horizon,
        picard_tol: p.picard_tol,
        picard_max_iters: p.picard_max_iters,
        eps: p.eps,
        blowup_threshold: p.blowup_threshold,
        allow_out_of_theory: false,
    }
}

fn section<'a, T>(s: &'a Option<T>, c: Command) -> Result<&'a T> {
    s.as_ref().ok_or_else(|| RunError::validation(format!("missing [{c}] table")))
}

/// Checks every precondition that can be decided from the document alone.
pub fn validate(cfg: &ExperimentConfig) -> Result<()> {
    ensure(!cfg.output_dir.as_os_str().is_empty(), || "output_dir must not be empty".into())?;
    match cfg.command {
        Command::Transform => {
            let p = section(&cfg.transform, cfg.command)?;
            check_dim(p.d, 3)?;
            check_degree(p.degree)?;
            check_signal(&p.signal, p.d, p.degree)?;
            if let Some(r) = p.rule_order {
                ensure(r > p.degree, || format!("rule_order {r} must exceed degree {}", p.degree))?;
            }
        }
        Command::Semigroup => {
            let p = section(&cfg.semigroup, cfg.command)?;
            check_dim(p.d, 3)?;
            check_degree(p.degree)?;
            check_beta(p.beta)?;
            check_signal(&p.signal, p.d, p.degree)?;
            ensure(!p.times.is_empty(), || "times must not be empty".into())?;
            ensure(p.times.iter().all(|t| *t >= 0.0 && t.is_finite()), || "times must be finite and non-negative".into())?;
            if p.mehler {
                ensure(p.beta == 1.0, || "the Mehler comparison needs beta = 1".into())?;
                ensure(p.d <= 2, || "the Mehler comparison supports d <= 2".into())?;
                ensure(p.times.iter().all(|t| *t > 0.0), || "the Mehler kernel needs t > 0".into())?;
                ensure(p.mehler_rule_order > p.degree, || "mehler_rule_order must exceed degree".into())?;
            }
        }
        Command::Norm => {
            let p = section(&cfg.norm, cfg.command)?;
            check_dim(p.d, 2)?;
            check_degree(p.degree)?;
            check_signal(&p.signal, p.d, p.degree)?;
            let w = parse_window(&p.window)?;
            ensure(!p.norms.is_empty(), || "norms must not be empty".into())?;
            for n in &p.norms {
                norm_spec(n)?;
            }
            let grid = norm_grid(p, &w)?;
            grid.check_resolution(w.essential_radius())?;
        }
        Command::Decay => {
            let p = section(&cfg.decay, cfg.command)?;
            check_dim(p.d, 2)?;
            check_degree(p.degree)?;
            check_beta(p.beta)?;
            check_signal(&p.signal, p.d, p.degree)?;
            exponent_set(&p.exponents)?;
            ensure(p.t_start > 0.0 && p.t_end > p.t_start && p.t_end.is_finite(), || {
                format!("need 0 < t_start < t_end, got [{}, {}]", p.t_start, p.t_end)
            })?;
            ensure(p.samples >= 2, || "samples must be at least 2".into())?;
        }
        Command::Smoothing => {
            let p = section(&cfg.smoothing, cfg.command)?;
            check_degree(p.degree)?;
            ensure(!p.betas.is_empty() && !p.exponents.is_empty(), || "betas and exponents must not be empty".into())?;
            for &b in &p.betas {
                check_beta(b)?;
            }
            for x in &p.exponents {
                exponent_set(x)?;
            }
            for s in &p.signals {
                check_signal(s, 1, p.degree)?;
            }
            ensure(p.t_min > 0.0 && p.t_min < 1.0, || "t_min must lie in (0, 1)".into())?;
            ensure(p.damping_t_min > 0.0 && p.damping_t_min < 1.0, || "damping_t_min must lie in (0, 1)".into())?;
            ensure(p.samples >= 2 && p.damping_samples >= 2, || "sample counts must be at least 2".into())?;
        }
        Command::Solve => {
            let p = section(&cfg.solve, cfg.command)?;
            check_dim(p.d, 2)?;
            check_degree(p.degree)?;
            check_signal(&p.signal, p.d, p.degree)?;
            let sc = solver_config(p);
            sc.validate()?;
            let spec = norm_spec(&p.norm)?;
            sc.check_admissible(spec.p, spec.q)?;
        }
        Command::Blowup => {
            let p = section(&cfg.blowup, cfg.command)?;
            check_dim(p.d, 2)?;
            check_degree(p.degree)?;
            ensure(p.a >= 0.0 && p.a.is_finite(), || format!("a must be finite and non-negative, got {}", p.a))?;
            ensure(p.lambda > 0.0 && p.lambda.is_finite(), || format!("lambda must be positive, got {}", p.lambda))?;
            let sc = blowup_solver_config(p);
            sc.validate()?;
            sc.check_admissible(f64::INFINITY, 1.0)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: Command,
    pub seed: u64,
    pub config: String,
    pub versions: serde_json::Value,
    pub grid_hashes: Vec<String>,
    pub artifacts: Vec<Artifact>,
    pub wall_time_seconds: f64,
}

/// Validates, runs and writes `manifest.json` next to the artifacts.
pub fn run(cfg: &ExperimentConfig) -> Result<Manifest> {
    validate(cfg)?;
    let start = Instant::now();
    let mut out = ArtifactWriter::create(&cfg.output_dir)?;
    let mut grids = Vec::new();
    match cfg.command {
        Command::Transform => run_transform(section(&cfg.transform, cfg.command)?, cfg.seed, &mut out)?,
        Command::Semigroup => run_semigroup(section(&cfg.semigroup, cfg.command)?, cfg.seed, &mut out)?,
        Command::Norm => run_norm(section(&cfg.norm, cfg.command)?, cfg.seed, &mut out, &mut grids)?,
        Command::Decay => run_decay(section(&cfg.decay, cfg.command)?, cfg.seed, &mut out, &mut grids)?,
        Command::Smoothing => run_smoothing(section(&cfg.smoothing, cfg.command)?, cfg.seed, &mut out, &mut grids)?,
        Command::Solve => run_solve(section(&cfg.solve, cfg.command)?, cfg.seed, &mut out, &mut grids)?,
        Command::Blowup => run_blowup(section(&cfg.blowup, cfg.command)?, &mut out)?,
    }
    let manifest = Manifest {
        command: cfg.command,
        seed: cfg.seed,
        config: emit(cfg),
        versions: json!({
            "hermheat": hermheat_version(),
            "hermheat-cli": env!("CARGO_PKG_VERSION"),
        }),
        grid_hashes: grids,
        artifacts: out.artifacts().to_vec(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    out.json("manifest.json", &manifest)?;
    Ok(manifest)
}

fn hermheat_version() -> &'static str {
    // both crates share the workspace version
    env!("CARGO_PKG_VERSION")
}

fn write_expansion_files(out: &mut ArtifactWriter, stem: &str, e: &HermiteExpansion) -> Result<()> {
    out.bytes(&format!("{stem}.bin"), &expansion_to_bytes(e))?;
    out.json(&format!("{stem}.json"), &ExpansionRecord::from(e))?;
    Ok(())
}

fn axis_header(prefix: &str, d: usize) -> Vec<String> {
    if d == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=d).map(|i| format!("{prefix}{i}")).collect()
    }
}

fn run_transform(p: &TransformParams, seed: u64, out: &mut ArtifactWriter) -> Result<()> {
    let e = signal::expansion(&p.signal, p.d, p.degree, seed)?;
    let rule = gauss_hermite_rule(p.rule_order.unwrap_or(p.degree + 1))?;
    let grid = SpectralGrid::gauss(e.basis().clone(), &rule)?;
    let values = grid.synthesize_values(&e)?;
    let back = grid.analyze_values(&values)?;
    let quad_l2 = values
        .iter()
        .zip(grid.weights())
        .map(|(v, w)| v.norm_sqr() * w)
        .sum::<f64>()
        .sqrt();
    let l2 = e.l2_norm();

    let mut header = axis_header("alpha", p.d);
    header.extend(["order", "re", "im"].map(String::from));
    let rows: Vec<Vec<Cell>> = e
        .basis()
        .indices()
        .iter()
        .zip(e.coeffs())
        .map(|(a, c)| {
            let mut r: Vec<Cell> = a.entries().iter().map(|&n| Cell::Int(n)).collect();
            r.extend([Cell::Int(a.order()), c.re.into(), c.im.into()]);
            r
        })
        .collect();
    out.csv("coefficients.csv", &header.iter().map(String::as_str).collect::<Vec<_>>(), &rows)?;

    let mut header = axis_header("x", p.d);
    header.extend(["weight", "re", "im"].map(String::from));
    let rows: Vec<Vec<Cell>> = grid
        .points()
        .iter()
        .zip(grid.weights())
        .zip(&values)
        .map(|((x, &w), v)| {
            let mut r: Vec<Cell> = x.iter().map(|&v| v.into()).collect();
            r.extend([w.into(), v.re.into(), v.im.into()]);
            r
        })
        .collect();
    out.csv("samples.csv", &header.iter().map(String::as_str).collect::<Vec<_>>(), &rows)?;
    write_expansion_files(out, "expansion", &e)?;
    out.json(
        "summary.json",
        &json!({
            "d": p.d,
            "N": p.degree,
            "rule_order": rule.order(),
            "l2_norm": l2,
            "quadrature_l2_norm": quad_l2,
            "parseval_error": (quad_l2 - l2).abs(),
            "roundtrip_error": back.sub(&e)?.l2_norm(),
        }),
    )?;
    Ok(())
}

fn run_semigroup(p: &SemigroupParams, seed: u64, out: &mut ArtifactWriter) -> Result<()> {
    let e = signal::expansion(&p.signal, p.d, p.degree, seed)?;
    let norm0 = e.l2_norm();
    let mehler = if p.mehler {
        let rule = gauss_hermite_rule(p.mehler_rule_order)?;
        let grid = SpectralGrid::gauss(e.basis().clone(), &rule)?;
        let samples = grid.synthesize_values(&e)?;
        Some((rule, grid, samples))
    } else {
        None
    };
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &t in &p.times {
        let s = apply_semigroup(&e, &FlowParams::new(p.beta, t, p.d)?)?;
        let n = s.l2_norm();
        let rel = match &mehler {
            Some((rule, grid, samples)) => {
                let k = grid.analyze_values(&mehler_apply(samples, p.d, t, rule)?)?;
                let r = k.sub(&s)?.l2_norm() / n;
                worst = worst.max(r);
                Some(r)
            }
            None => None,
        };
        rows.push(vec![
            t.into(),
            n.into(),
            (n / norm0).into(),
            (-t * eigenvalue(0, p.d, p.beta)).exp().into(),
            rel.into(),
        ]);
    }
    out.csv("semigroup.csv", &["t", "l2_norm", "ratio", "ground_factor", "mehler_rel_error"], &rows)?;
    out.json(
        "summary.json",
        &json!({
            "d": p.d,
            "N": p.degree,
            "beta": p.beta,
            "initial_l2_norm": norm0,
            "max_mehler_rel_error": if p.mehler { Some(worst) } else { None },
        }),
    )?;
    Ok(())
}

fn norm_grid(p: &NormParams, w: &Window) -> Result<PhaseSpaceGrid> {
    Ok(match p.grid {
        Some(g) => PhaseSpaceGrid::new(p.d, g.x_extent, g.xi_extent, g.n_x, g.n_xi)?,
        None => PhaseSpaceGrid::for_degree(p.d, p.degree, w)?,
    })
}

fn run_norm(p: &NormParams, seed: u64, out: &mut ArtifactWriter, grids: &mut Vec<String>) -> Result<()> {
    let window = parse_window(&p.window)?;
    let grid = norm_grid(p, &window)?;
    grids.push(grid.hash());
    let sig = signal::signal(&p.signal, p.d, p.degree, seed)?;
    let m = stft(&sig, &window, &grid)?;
    if !m.is_finite() {
        return Err(hermheat::Error::NonFinite("STFT".into()).into());
    }
    let mut records = Vec::new();
    for n in &p.norms {
        let spec = norm_spec(n)?;
        let v = mixed_norm(&m, &spec);
        if !v.is_finite() {
            return Err(hermheat::Error::NonFinite(format!("norm (p, q) = ({}, {})", n.p, n.q)).into());
        }
        records.push(NormRecord::new(&spec, v, &grid));
    }
    let rows: Vec<Vec<Cell>> = p
        .norms
        .iter()
        .zip(&records)
        .map(|(n, r)| {
            let order = match n.order {
                Order::XInner => "x-inner",
                Order::XiInner => "xi-inner",
            };
            vec![n.p.into(), n.q.into(), n.s.into(), order.into(), r.value.into(), r.grid_hash.clone().into()]
        })
        .collect();
    out.csv("norms.csv", &["p", "q", "s", "order", "value", "grid_hash"], &rows)?;
    out.json("norms.json", &records)?;
    if p.export_stft {
        let mut csv = Vec::new();
        write_matrix_csv(&m, &mut csv)?;
        out.bytes("stft.csv", &csv)?;
        let mut bin = Vec::new();
        write_matrix(&m, &mut bin)?;
        out.bytes("stft.bin", &bin)?;
    }
    Ok(())
}

fn run_decay(p: &DecayParams, seed: u64, out: &mut ArtifactWriter, grids: &mut Vec<String>) -> Result<()> {
    let e = signal::expansion(&p.signal, p.d, p.degree, seed)?;
    let x = exponent_set(&p.exponents)?;
    let eval = NormEvaluator::for_degree(p.d, p.degree)?;
    grids.push(eval.grid().hash());
    let times = decay_times(p);
    let report = decay_report(&e, p.beta, &x, &times, &eval)?;
    let rows: Vec<Vec<Cell>> = report.rows().iter().map(|r| r.iter().map(|&v| v.into()).collect()).collect();
    out.csv("decay.csv", &["t", "ratio", "theory", "ratio/theory"], &rows)?;

    let expected = eigenvalue(0, p.d, p.beta);
    let sigma = x.reduced().sigma(p.d, p.beta);
    let rate_error = report.fitted_large_time_rate.map(|r| (r - expected).abs() / expected);
    out.csv(
        "fit.csv",
        &["fitted_rate", "expected_rate", "relative_error", "fitted_small_time_slope", "sigma", "K"],
        &[vec![
            report.fitted_large_time_rate.into(),
            expected.into(),
            rate_error.into(),
            report.fitted_small_time_slope.into(),
            sigma.into(),
            report.sup_bounded_constant.into(),
        ]],
    )?;
    out.json(
        "summary.json",
        &json!({
            "exponents": report.exponents,
            "beta": p.beta,
            "d": p.d,
            "fitted_large_time_rate": report.fitted_large_time_rate,
            "expected_large_time_rate": expected,
            "fitted_small_time_slope": report.fitted_small_time_slope,
            "sigma": sigma,
            "K": report.sup_bounded_constant,
            "flags": {
                "rate_within_2_percent": rate_error.map(|r| r < 0.02),
                "bounded": report.sup_bounded_constant.is_finite(),
                "small_time_consistent": report.fitted_small_time_slope.map(|s| s >= -sigma - 0.1),
            },
        }),
    )?;
    Ok(())
}

fn run_smoothing(p: &SmoothingParams, seed: u64, out: &mut ArtifactWriter, grids: &mut Vec<String>) -> Result<()> {
    let family: Vec<(String, HermiteExpansion)> = if p.signals.is_empty() {
        stress_family(p.degree)?
    } else {
        p.signals
            .iter()
            .map(|s| Ok((signal::label(s), signal::expansion(s, 1, p.degree, seed)?)))
            .collect::<Result<_>>()?
    };
    let window = Window::gaussian();
    let grid = PhaseSpaceGrid::for_degree(1, p.degree, &window)?;
    let coarse = NormEvaluator::new(grid.clone(), window.clone(), p.degree)?;
    grids.push(grid.hash());
    let fine = if p.refine {
        let g = grid.refined();
        grids.push(g.hash());
        Some(NormEvaluator::new(g, window, p.degree)?)
    } else {
        None
    };

    let mut rows = Vec::new();
    let mut max_drift: f64 = 0.0;
    let mut all_finite = true;
    for (name, f) in &family {
        for &beta in &p.betas {
            for xs in &p.exponents {
                let x = exponent_set(xs)?;
                let a = fit_small_time(f, beta, &x, p.t_min, p.samples, &coarse)?;
                let refined = match &fine {
                    Some(ev) => Some(fit_small_time(f, beta, &x, p.t_min, p.samples, ev)?.sup_scaled),
                    None => None,
                };
                let drift = refined.map(|b| (a.sup_scaled / b - 1.0).abs());
                max_drift = max_drift.max(drift.unwrap_or(0.0));
                all_finite &= a.sup_scaled.is_finite();
                rows.push(vec![
                    name.as_str().into(),
                    beta.into(),
                    xs.p1.into(),
                    xs.q1.into(),
                    xs.p2.into(),
                    xs.q2.into(),
                    a.sigma.into(),
                    a.sup_scaled.into(),
                    refined.into(),
                    drift.into(),
                    a.slope.into(),
                    a.consistent(0.1).into(),
                ]);
            }
        }
    }
    out.csv(
        "smoothing.csv",
        &[
            "signal",
            "beta",
            "p1",
            "q1",
            "p2",
            "q2",
            "sigma",
            "sup_scaled",
            "sup_scaled_refined",
            "drift",
            "slope",
            "consistent",
        ],
        &rows,
    )?;

    let mut damping_rows = Vec::new();
    let mut worst_damping: f64 = 0.0;
    for &beta in &p.betas {
        for xs in &p.exponents {
            let fit = fit_damping_slope(beta, &exponent_set(xs)?, p.damping_t_min, p.damping_samples)?;
            worst_damping = worst_damping.max(fit.relative_error());
            damping_rows.push(vec![
                beta.into(),
                xs.p1.into(),
                xs.q1.into(),
                xs.p2.into(),
                xs.q2.into(),
                fit.sigma.into(),
                fit.slope.into(),
                fit.relative_error().into(),
            ]);
        }
    }
    out.csv(
        "damping.csv",
        &["beta", "p1", "q1", "p2", "q2", "sigma", "slope", "relative_error"],
        &damping_rows,
    )?;
    out.json(
        "summary.json",
        &json!({
            "max_refinement_drift": if p.refine { Some(max_drift) } else { None },
            "worst_damping_relative_error": worst_damping,
            "flags": {
                "sup_finite": all_finite,
                "refinement_stable": if p.refine { Some(max_drift < 0.1) } else { None },
                "damping_slope_within_2_percent": worst_damping < 0.02,
            },
        }),
    )?;
    Ok(())
}

fn run_solve(p: &SolveParams, seed: u64, out: &mut ArtifactWriter, grids: &mut Vec<String>) -> Result<()> {
    let cfg = solver_config(p);
    let spec = norm_spec(&p.norm)?;
    let u0 = signal::expansion(&p.signal, p.d, p.degree, seed)?;
    let eval = NormEvaluator::for_degree(p.d, p.degree)?;
    grids.push(eval.grid().hash());
    let sol = picard_solve_with(&u0, &cfg, &spec, &eval)?;
    let bottom = cfg.bottom_eigenvalue();
    let rows: Vec<Vec<Cell>> = sol
        .trajectory
        .rows(bottom)
        .iter()
        .map(|r| r.iter().map(|&v| v.into()).collect())
        .collect();
    out.csv("trajectory.csv", &["t", "norm", "exp(t*d^beta)*norm"], &rows)?;
    let r = &sol.report;
    let picard: Vec<Vec<Cell>> = r
        .differences
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let ratio = if i == 0 { None } else { Some(r.contraction_ratios[i - 1]) };
            vec![(i + 1).into(), d.into(), ratio.into()]
        })
        .collect();
    out.csv("picard.csv", &["iteration", "difference", "contraction_ratio"], &picard)?;
    if p.snapshot_stride > 0 {
        for (i, s) in sol.trajectory.states.iter().enumerate().step_by(p.snapshot_stride) {
            out.bytes(&format!("snapshots/state_{i:05}.bin"), &expansion_to_bytes(s))?;
        }
    }
    let x = decay_monitor(&sol.trajectory, &cfg)?;
    out.json(
        "report.json",
        &json!({
            "picard": r,
            "x_estimate": x,
            "final_time": sol.trajectory.times.last(),
            "final_norm": sol.trajectory.norms.last(),
            "mesh_points": sol.trajectory.len(),
        }),
    )?;
    Ok(())
}

fn run_blowup(p: &BlowupParams, out: &mut ArtifactWriter) -> Result<()> {
    let cfg = blowup_solver_config(p);
    let c = blowup_contrast(p.a, &cfg)?;
    out.json("verdict.json", &c)?;
    Ok(())
}

/// Resolves a relative `output_dir` against the directory of the config
/// file.
pub fn resolve_output(cfg: &mut ExperimentConfig, config_path: &Path) {
    if cfg.output_dir.is_relative() {
        if let Some(parent) = config_path.parent() {
            cfg.output_dir = parent.join(&cfg.output_dir);
        }
    }
}

use hermheat::estimator::{corpus, NormEvaluator};
use hermheat::hermite::{gauss_hermite_rule, HermiteBasis, HermiteExpansion, SpectralGrid};
use hermheat::phasespace::NormSpec;
use hermheat::semigroup::{apply_semigroup, mehler_apply, FlowParams};
use hermheat::solver::*;
use hermheat::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn l2() -> NormSpec {
    NormSpec::modulation(2.0, 2.0, 0.0).unwrap()
}

fn ground(a: f64, n: usize) -> HermiteExpansion {
    HermiteExpansion::from_real_1d(&[a]).unwrap().with_degree(n).unwrap()
}

fn run(a: f64, n: usize, dt: f64, horizon: f64) -> Solution {
    let cfg = SolverConfig {
        degree: n,
        dt,
        horizon,
        eps: 10.0,
        allow_out_of_theory: true,
        ..Default::default()
    };
    picard_solve(&ground(a, n), &cfg, &l2()).unwrap()
}

#[test]
fn trapezoid_is_second_order() {
    let finals: Vec<HermiteExpansion> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&dt| run(0.5, 8, dt, 1.0).trajectory.final_state().clone())
        .collect();
    let e1 = finals[0].sub(&finals[1]).unwrap().l2_norm();
    let e2 = finals[1].sub(&finals[2]).unwrap().l2_norm();
    let order = (e1 / e2).log2();
    assert!((order - 2.0).abs() < 0.25, "order {order}");
}

#[test]
fn truncation_is_spectrally_accurate() {
    let a = run(0.01, 12, 0.05, 4.0);
    let b = run(0.01, 16, 0.05, 4.0);
    let (na, nb) = (*a.trajectory.norms.last().unwrap(), *b.trajectory.norms.last().unwrap());
    assert!((na / nb - 1.0).abs() < 0.01);
}

#[test]
fn mesh_modulus_of_continuity() {
    let ev = NormEvaluator::for_degree(1, 8).unwrap();
    let modulus = |dt: f64| {
        let s = run(0.5, 8, dt, 1.0);
        s.trajectory
            .states
            .windows(2)
            .map(|w| ev.norm(&w[1].sub(&w[0]).unwrap(), &l2()).unwrap())
            .fold(0.0, f64::max)
    };
    let (a, b, c) = (modulus(0.04), modulus(0.02), modulus(0.01));
    assert!(a > b && b > c);
    assert!((a / b).log2() >= 0.95 && (b / c).log2() >= 0.95);
}

#[test]
fn x_norm_is_horizon_stable() {
    let xs: Vec<f64> = [2.0, 4.0, 8.0]
        .iter()
        .map(|&t| {
            let cfg = SolverConfig { horizon: t, allow_out_of_theory: true, ..Default::default() };
            let s = picard_solve(&ground(0.01, 16), &cfg, &l2()).unwrap();
            decay_monitor(&s.trajectory, &cfg).unwrap()
        })
        .collect();
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(0.0, f64::max);
    assert!(hi / lo < 1.1, "{xs:?}");
}

#[test]
fn wiener_amalgam_variant_runs() {
    let cfg = SolverConfig { degree: 10, horizon: 2.0, ..Default::default() };
    // W with ξ-inner L^2 and x-outer L^1 is the Fourier image of M^{2,1}
    let spec = NormSpec::amalgam(2.0, 1.0, 0.0).unwrap();
    let s = picard_solve(&ground(0.01, 10), &cfg, &spec).unwrap();
    assert_eq!(s.report.mode, SolveMode::Global);
    assert!(s.report.residual < 1e-10);
}

#[test]
fn multilinear_bound_has_a_finite_constant() {
    // ||λ|u|^{2k}u||_{M^{p,r}} <= C ||u||^{2k+1}_{M^{p,q}}, (2k+1)/q = 1/r + 2k
    let n = 10;
    let ev = NormEvaluator::for_degree(1, n).unwrap();
    let one = Complex64::new(1.0, 0.0);
    for (k, p, q) in [(1usize, 2.0, 1.0), (1, 1.0, 1.2), (2, 2.0, 1.0)] {
        let kf = k as f64;
        let r = 1.0 / ((2.0 * kf + 1.0) / q - 2.0 * kf);
        let nl = Nonlinearity::new(1, n, k).unwrap();
        let mut c = 0.0f64;
        for e in corpus(2).into_iter().take(10) {
            let f = e.project(n).unwrap();
            let f = f.scale(Complex64::new(1.0 / ev.modulation(&f, p, q).unwrap(), 0.0));
            let out = ev.modulation(&nl.apply(&f, one).unwrap(), p, r).unwrap();
            c = c.max(out);
        }
        assert!(c.is_finite() && c > 0.0 && c < 10.0, "k={k} p={p} q={q}: C = {c}");
    }
}

#[test]
fn mehler_matches_spectral_flow_at_full_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (dim, n) in [(1usize, 20usize), (2, 20)] {
        let basis = HermiteBasis::shared(dim, n).unwrap();
        let c = (0..basis.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let e = HermiteExpansion::from_coeffs(basis.clone(), c).unwrap();
        let rule = gauss_hermite_rule(220).unwrap();
        let grid = SpectralGrid::gauss(basis, &rule).unwrap();
        for t in [0.05, 0.5, 3.0] {
            let samples = grid.synthesize_values(&e).unwrap();
            let kernel = grid.analyze_values(&mehler_apply(&samples, dim, t, &rule).unwrap()).unwrap();
            let spectral = apply_semigroup(&e, &FlowParams::new(1.0, t, dim).unwrap()).unwrap();
            let rel = kernel.sub(&spectral).unwrap().l2_norm() / spectral.l2_norm();
            assert!(rel < 1e-8, "d={dim} t={t} rel={rel}");
        }
    }
}

#[test]
fn blowup_contrast_cases() {
    let cfg = SolverConfig { degree: 12, horizon: 2.0, ..Default::default() };
    for (a, k) in [(1.0, 1usize), (2.0, 1), (1.0, 2)] {
        let c = blowup_contrast(a, &SolverConfig { k, ..cfg.clone() }).unwrap();
        assert!(c.free.blew_up && c.free.relative_gap.unwrap() < 0.05, "{c:?}");
    }
    let c = blowup_contrast(0.05, &cfg).unwrap();
    assert!(c.hermite.decayed && c.hermite.x_estimate.unwrap().is_finite());
}

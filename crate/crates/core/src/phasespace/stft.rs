//! `V_g f(x, xi) = int e^{-i xi.y} f(y) conj(g(y - x)) dy`
//!
//! The `y` integral is a uniform Riemann sum restricted to the window's
//! support around each `x`. Expansions go through precomputed tables of
//! `V_g h_n`, which factor over coordinates for tensor windows.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{PhaseSpaceGrid, PhaseSpaceMatrix};
use super::window::Window;
use crate::error::{Error, Result};
use crate::hermite::{hermite_table, HermiteExpansion};

type RealFn = dyn Fn(f64) -> Complex64 + Send + Sync;

/// A 1-D function given by point evaluation.
#[derive(Clone)]
pub struct SampledFunction {
    name: String,
    f: Arc<RealFn>,
    /// `f` vanishes for `|y| > support`.
    support: f64,
    /// `y` step for the STFT sum; `None` picks one from the grid.
    step: Option<f64>,
}

impl SampledFunction {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        SampledFunction {
            name: name.into(),
            f: Arc::new(f),
            support: f64::INFINITY,
            step: None,
        }
    }

    pub fn with_support(mut self, support: f64) -> Self {
        self.support = support;
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = Some(step);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn step(&self) -> Option<f64> {
        self.step
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        if y.abs() > self.support {
            Complex64::new(0.0, 0.0)
        } else {
            (self.f)(y)
        }
    }

    /// Pointwise scalar multiple, keeping support and step.
    pub fn scaled(&self, a: Complex64) -> Self {
        let f = self.f.clone();
        SampledFunction {
            name: format!("{a}*{}", self.name),
            f: Arc::new(move |y| a * f(y)),
            ..self.clone()
        }
    }

    /// Pointwise sum; the finer of the two steps is kept.
    pub fn plus(&self, other: &Self) -> Self {
        let (f, g) = (self.f.clone(), other.f.clone());
        let (sa, sb) = (self.support, other.support);
        let step = match (self.step, other.step) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        SampledFunction {
            name: format!("{}+{}", self.name, other.name),
            f: Arc::new(move |y| {
                let a = if y.abs() > sa { Complex64::new(0.0, 0.0) } else { f(y) };
                let b = if y.abs() > sb { Complex64::new(0.0, 0.0) } else { g(y) };
                a + b
            }),
            support: sa.max(sb),
            step,
        }
    }
}

impl fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledFunction")
            .field("name", &self.name)
            .field("support", &self.support)
            .field("step", &self.step)
            .finish()
    }
}

/// Input to the STFT.
#[derive(Debug, Clone)]
pub enum Signal {
    Expansion(HermiteExpansion),
    Function(SampledFunction),
}

impl From<HermiteExpansion> for Signal {
    fn from(e: HermiteExpansion) -> Self {
        Signal::Expansion(e)
    }
}

impl From<SampledFunction> for Signal {
    fn from(f: SampledFunction) -> Self {
        Signal::Function(f)
    }
}

impl Signal {
    pub fn dim(&self) -> usize {
        match self {
            Signal::Expansion(e) => e.dim(),
            Signal::Function(_) => 1,
        }
    }
}

/// Bandwidth proxy of a degree-`n` Hermite expansion.
fn band(n: usize) -> f64 {
    ((2 * n + 1) as f64).sqrt() + 6.0
}

/// Uniform `y` grid `j h`, `|j| <= half`.
struct YGrid {
    h: f64,
    half: i64,
}

impl YGrid {
    fn y(&self, j: i64) -> f64 {
        j as f64 * self.h
    }

    fn len(&self) -> usize {
        (2 * self.half + 1) as usize
    }

    fn nodes(&self) -> Vec<f64> {
        (-self.half..=self.half).map(|j| self.y(j)).collect()
    }
}

/// 1-D STFT of several signals sampled on a common `y` grid.
/// Returns, per signal, an `n_x * n_xi` block.
fn stft_1d_many(
    samples: &[Vec<Complex64>],
    y: &YGrid,
    grid: &PhaseSpaceGrid,
    window: &Window,
) -> Vec<Vec<Complex64>> {
    let xs = grid.x_axis();
    let xis = grid.xi_axis();
    let ny = y.len();
    let nxi = xis.len();
    let r = window.radius();

    // e^{-i xi_k y_j}
    let nodes = y.nodes();
    let phase: Vec<Complex64> = xis
        .iter()
        .flat_map(|&xi| nodes.iter().map(move |&yj| Complex64::from_polar(1.0, -xi * yj)))
        .collect();

    let rows: Vec<Vec<Vec<Complex64>>> = xs
        .par_iter()
        .map(|&x| {
            let lo = (((x - r) / y.h).ceil() as i64).max(-y.half);
            let hi = (((x + r) / y.h).floor() as i64).min(y.half);
            let mut out = vec![vec![Complex64::new(0.0, 0.0); nxi]; samples.len()];
            if lo > hi {
                return out;
            }
            let a = (lo + y.half) as usize;
            let b = (hi + y.half) as usize;
            let gwin: Vec<Complex64> = (lo..=hi).map(|j| window.eval(y.y(j) - x).conj() * y.h).collect();
            for (s, row) in samples.iter().zip(out.iter_mut()) {
                let u: Vec<Complex64> = s[a..=b].iter().zip(&gwin).map(|(f, g)| f * g).collect();
                if u.iter().all(|v| v.norm_sqr() == 0.0) {
                    continue;
                }
                for (k, o) in row.iter_mut().enumerate() {
                    let ph = &phase[k * ny + a..=k * ny + b];
                    *o = u.iter().zip(ph).fold(Complex64::new(0.0, 0.0), |acc, (v, e)| acc + v * e);
                }
            }
            out
        })
        .collect();

    let nx = xs.len();
    let mut blocks = vec![vec![Complex64::new(0.0, 0.0); nx * nxi]; samples.len()];
    for (ix, per_signal) in rows.into_iter().enumerate() {
        for (s, row) in per_signal.into_iter().enumerate() {
            blocks[s][ix * nxi..(ix + 1) * nxi].copy_from_slice(&row);
        }
    }
    blocks
}

fn y_grid(grid: &PhaseSpaceGrid, window: &Window, step: f64, support: f64) -> YGrid {
    let reach = (grid.x_extent + window.radius()).min(support);
    YGrid {
        h: step,
        half: (reach / step).ceil() as i64,
    }
}

/// STFT of a signal on a grid.
pub fn stft(f: &Signal, window: &Window, grid: &PhaseSpaceGrid) -> Result<PhaseSpaceMatrix> {
    grid.check_resolution(window.essential_radius())?;
    if f.dim() != grid.dim {
        return Err(Error::DimensionMismatch {
            expected: grid.dim,
            got: f.dim(),
        });
    }
    match f {
        Signal::Expansion(e) => ExpansionStft::new(grid.clone(), window.clone(), e.degree())?.apply(e),
        Signal::Function(func) => {
            let step = func.step().unwrap_or_else(|| default_function_step(grid, window));
            let y = y_grid(grid, window, step, func.support());
            let samples: Vec<Complex64> = y.nodes().iter().map(|&v| func.eval(v)).collect();
            let mut blocks = stft_1d_many(&[samples], &y, grid, window);
            PhaseSpaceMatrix::from_values(grid.clone(), blocks.pop().expect("one block"))
        }
    }
}

/// Step used for function signals without an explicit one.
pub fn default_function_step(grid: &PhaseSpaceGrid, window: &Window) -> f64 {
    std::f64::consts::PI / (2.0 * (grid.xi_extent + band(window.profile().degree())))
}

/// Tables of `V_g h_n` for `n <= degree`, reused across expansions.
#[derive(Debug, Clone)]
pub struct ExpansionStft {
    grid: PhaseSpaceGrid,
    window: Window,
    degree: usize,
    /// `tables[n][ix * n_xi + ik]`, one-dimensional.
    tables: Vec<Vec<Complex64>>,
    /// `gram[m * (degree + 1) + n] = sum w_x w_xi conj(V h_m) V h_n`
    gram: Vec<Complex64>,
}

impl ExpansionStft {
    pub fn new(grid: PhaseSpaceGrid, window: Window, degree: usize) -> Result<Self> {
        grid.check_resolution(window.essential_radius())?;
        let step = std::f64::consts::PI / (grid.xi_extent + band(degree) + band(window.profile().degree()));
        let one_d = PhaseSpaceGrid { dim: 1, ..grid.clone() };
        let y = y_grid(&one_d, &window, step, f64::INFINITY);
        let nodes = y.nodes();
        let per_node: Vec<Vec<f64>> = nodes.par_iter().map(|&v| hermite_table(degree, v)).collect();
        let samples: Vec<Vec<Complex64>> = (0..=degree)
            .map(|n| per_node.iter().map(|t| Complex64::new(t[n], 0.0)).collect())
            .collect();
        let tables = stft_1d_many(&samples, &y, &one_d, &window);

        let wx = one_d.x_weights();
        let wxi = one_d.xi_weights();
        let nxi = one_d.n_xi;
        let cell: Vec<f64> = (0..one_d.n_x * nxi).map(|i| wx[i / nxi] * wxi[i % nxi]).collect();
        let m = degree + 1;
        let mut gram = vec![Complex64::new(0.0, 0.0); m * m];
        for a in 0..m {
            for b in 0..m {
                gram[a * m + b] = tables[a]
                    .iter()
                    .zip(&tables[b])
                    .zip(&cell)
                    .fold(Complex64::new(0.0, 0.0), |acc, ((u, v), &w)| acc + u.conj() * v * w);
            }
        }
        Ok(ExpansionStft {
            grid,
            window,
            degree,
            tables,
            gram,
        })
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn check(&self, e: &HermiteExpansion) -> Result<()> {
        if e.dim() != self.grid.dim {
            return Err(Error::DimensionMismatch {
                expected: self.grid.dim,
                got: e.dim(),
            });
        }
        if e.degree() > self.degree {
            return Err(Error::invalid(format!(
                "expansion degree {} exceeds table degree {}",
                e.degree(),
                self.degree
            )));
        }
        Ok(())
    }

    pub fn apply(&self, e: &HermiteExpansion) -> Result<PhaseSpaceMatrix> {
        self.check(e)?;
        let nx = self.grid.n_x;
        let nxi = self.grid.n_xi;
        let block = nx * nxi;
        let zero = Complex64::new(0.0, 0.0);
        let combine = |weights: &[(usize, Complex64)]| -> Vec<Complex64> {
            let mut out = vec![zero; block];
            for &(n, c) in weights {
                if c == zero {
                    continue;
                }
                for (o, v) in out.iter_mut().zip(&self.tables[n]) {
                    *o += c * v;
                }
            }
            out
        };
        let indices = e.basis().indices();
        match self.grid.dim {
            1 => {
                let w: Vec<(usize, Complex64)> = indices.iter().zip(e.coeffs()).map(|(a, &c)| (a.entries()[0], c)).collect();
                PhaseSpaceMatrix::from_values(self.grid.clone(), combine(&w))
            }
            _ => {
                // W_{n1}(x2, xi2) = sum_{n2} c_{(n1, n2)} V h_{n2}
                let partial: Vec<Vec<Complex64>> = (0..=e.degree())
                    .map(|n1| {
                        let w: Vec<(usize, Complex64)> = indices
                            .iter()
                            .zip(e.coeffs())
                            .filter(|(a, _)| a.entries()[0] == n1)
                            .map(|(a, &c)| (a.entries()[1], c))
                            .collect();
                        combine(&w)
                    })
                    .collect();
                let xi_count = nxi * nxi;
                let mut values = vec![zero; nx * nx * xi_count];
                values.par_chunks_mut(nx * xi_count).enumerate().for_each(|(ix1, chunk)| {
                    for (n1, part) in partial.iter().enumerate() {
                        let t1 = &self.tables[n1][ix1 * nxi..(ix1 + 1) * nxi];
                        if t1.iter().all(|v| *v == zero) {
                            continue;
                        }
                        for ix2 in 0..nx {
                            let p2 = &part[ix2 * nxi..(ix2 + 1) * nxi];
                            let out = &mut chunk[ix2 * xi_count..(ix2 + 1) * xi_count];
                            for (ik1, &a) in t1.iter().enumerate() {
                                for (o, &b) in out[ik1 * nxi..(ik1 + 1) * nxi].iter_mut().zip(p2) {
                                    *o += a * b;
                                }
                            }
                        }
                    }
                });
                PhaseSpaceMatrix::from_values(self.grid.clone(), values)
            }
        }
    }

    /// Grid `L^2` norm of `V_g e` through the Gram matrix, without
    /// forming the phase-space matrix.
    pub fn l2_norm(&self, e: &HermiteExpansion) -> Result<f64> {
        self.check(e)?;
        let m = self.degree + 1;
        let idx = e.basis().indices();
        let c = e.coeffs();
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, ca) in idx.iter().zip(c) {
            if ca.norm_sqr() == 0.0 {
                continue;
            }
            for (b, cb) in idx.iter().zip(c) {
                let g: Complex64 = a
                    .entries()
                    .iter()
                    .zip(b.entries())
                    .map(|(&i, &j)| self.gram[i * m + j])
                    .product();
                acc += ca.conj() * cb * g;
            }
        }
        Ok(acc.re.max(0.0).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::MultiIndex;
    use std::f64::consts::PI;

    fn gauss() -> HermiteExpansion {
        HermiteExpansion::from_real_1d(&[1.0]).unwrap()
    }

    #[test]
    fn gaussian_closed_form() {
        let grid = PhaseSpaceGrid::square(1, 6.0, 49).unwrap();
        let m = stft(&gauss().into(), &Window::gaussian(), &grid).unwrap();
        let xs = grid.x_axis();
        let xis = grid.xi_axis();
        for (ix, &x) in xs.iter().enumerate() {
            for (ik, &xi) in xis.iter().enumerate() {
                let expect = (-(x * x + xi * xi) / 4.0).exp();
                assert!((m.get(ix, ik).norm() - expect).abs() < 1e-12, "x={x} xi={xi}");
            }
        }
    }

    #[test]
    fn function_path_matches_table_path() {
        let grid = PhaseSpaceGrid::square(1, 5.0, 33).unwrap();
        let e = HermiteExpansion::from_real_1d(&[0.5, -0.3, 0.0, 0.8]).unwrap();
        let e2 = e.clone();
        let f = SampledFunction::new("e", move |y| crate::hermite::synthesize_1d(&e2, &[y]).unwrap()[0]);
        let a = stft(&e.into(), &Window::gaussian(), &grid).unwrap();
        let b = stft(&f.into(), &Window::gaussian(), &grid).unwrap();
        for (u, v) in a.values.iter().zip(&b.values) {
            assert!((u - v).norm() < 1e-11);
        }
    }

    #[test]
    fn origin_value_is_inner_product() {
        let grid = PhaseSpaceGrid::square(1, 4.0, 17).unwrap();
        let e = HermiteExpansion::from_real_1d(&[0.3, 0.0, 0.9]).unwrap();
        let m = stft(&e.into(), &Window::gaussian(), &grid).unwrap();
        assert!((m.get(8, 8).norm() - 0.3).abs() < 1e-13);
    }

    #[test]
    fn zero_signal() {
        let grid = PhaseSpaceGrid::square(2, 4.0, 21).unwrap();
        let z = HermiteExpansion::zeros(2, 3).unwrap();
        let m = stft(&z.into(), &Window::gaussian(), &grid).unwrap();
        assert_eq!(m.max_abs(), 0.0);
    }

    #[test]
    fn conjugate_symmetry_for_real_data() {
        let grid = PhaseSpaceGrid::square(1, 5.0, 41).unwrap();
        let e = HermiteExpansion::from_real_1d(&[0.2, 0.7, -0.4, 0.1]).unwrap();
        for w in [Window::gaussian(), Window::hermite(1).unwrap()] {
            let m = stft(&e.clone().into(), &w, &grid).unwrap();
            let n = grid.n_xi;
            for ix in 0..grid.n_x {
                for ik in 0..n {
                    assert!((m.get(ix, n - 1 - ik) - m.get(ix, ik).conj()).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn two_dim_is_tensor_product() {
        let grid = PhaseSpaceGrid::square(2, 5.0, 21).unwrap();
        let e = HermiteExpansion::basis_function(&MultiIndex::from(vec![2, 1]), 3).unwrap();
        let m = stft(&e.into(), &Window::gaussian(), &grid).unwrap();
        let g1 = PhaseSpaceGrid::square(1, 5.0, 21).unwrap();
        let a = stft(&HermiteExpansion::from_real_1d(&[0.0, 0.0, 1.0]).unwrap().into(), &Window::gaussian(), &g1).unwrap();
        let b = stft(&HermiteExpansion::from_real_1d(&[0.0, 1.0]).unwrap().into(), &Window::gaussian(), &g1).unwrap();
        let n = 21;
        for (ix1, ix2, ik1, ik2) in [(3, 7, 10, 12), (10, 10, 2, 19), (0, 20, 5, 5)] {
            let v = m.get(ix1 * n + ix2, ik1 * n + ik2);
            let w = a.get(ix1, ik1) * b.get(ix2, ik2);
            assert!((v - w).norm() < 1e-14);
        }
    }

    #[test]
    fn gram_norm_is_orthogonality_relation() {
        for dim in [1usize, 2] {
            let w = Window::gaussian();
            let grid = PhaseSpaceGrid::for_degree(dim, 6, &w).unwrap();
            let t = ExpansionStft::new(grid, w, 6).unwrap();
            let e = HermiteExpansion::basis_function(&MultiIndex::from(vec![0; dim]), 6).unwrap();
            let expect = (2.0 * PI).powf(dim as f64 / 2.0);
            assert!((t.l2_norm(&e).unwrap() - expect).abs() < 1e-6 * expect);
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let grid = PhaseSpaceGrid::square(1, 10.0, 5).unwrap();
        assert!(matches!(
            stft(&gauss().into(), &Window::gaussian(), &grid),
            Err(Error::GridTooCoarse { .. })
        ));
    }
}

//! Normalized Hermite functions
//!
//! The 1-D functions are `h_n(x) = p_n(x) e^{-x^2/2}`, where `p_n` are the
//! polynomials orthonormal with respect to `e^{-x^2}`:
//!
//! ```text
//! p_0 = pi^{-1/4},  p_1 = sqrt(2) x p_0,
//! p_{n+1} = sqrt(2/(n+1)) x p_n - sqrt(n/(n+1)) p_{n-1}
//! ```
//!
//! The recurrence is run on `p_n` with a running logarithmic scale, and the
//! Gaussian factor is folded in only at the end. Plain Hermite polynomials
//! overflow near n = 300; this form stays finite for n in the thousands and
//! |x| up to `sqrt(2n) + 10`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `pi^{-1/4}`
pub const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;

const RESCALE: f64 = 1e150;
const LN_RESCALE: f64 = 345.387_763_949_107; // ln(1e150)

/// Running state of the scaled recurrence: the true value of `p_n` is
/// `cur * exp(log_scale)`.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    prev: f64,
    cur: f64,
    log_scale: f64,
}

impl Scaled {
    fn start(x: f64) -> (Self, f64) {
        let p0 = PI_POW_NEG_QUARTER;
        (
            Scaled {
                prev: p0,
                cur: std::f64::consts::SQRT_2 * x * p0,
                log_scale: 0.0,
            },
            p0,
        )
    }

    /// Advance from `p_n` (held in `cur`) to `p_{n+1}`.
    #[inline]
    fn step(&mut self, n: usize, x: f64) {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * self.cur - (nf / (nf + 1.0)).sqrt() * self.prev;
        self.prev = self.cur;
        self.cur = next;
        if self.cur.abs() > RESCALE {
            self.cur /= RESCALE;
            self.prev /= RESCALE;
            self.log_scale += LN_RESCALE;
        }
    }
}

/// Returns `(sign, ln|p_n(x)|)`. The sign is 0 at an exact zero.
pub(crate) fn log_abs_poly(n: usize, x: f64) -> (f64, f64) {
    let (mut s, p0) = Scaled::start(x);
    if n == 0 {
        return (1.0, p0.ln());
    }
    for m in 1..n {
        s.step(m, x);
    }
    let v = s.cur;
    if v == 0.0 {
        (0.0, f64::NEG_INFINITY)
    } else {
        (v.signum(), v.abs().ln() + s.log_scale)
    }
}

/// Ratio `p_n(x) / p_{n-1}(x)`, for Newton steps on the Gauss nodes.
pub(crate) fn poly_ratio(n: usize, x: f64) -> f64 {
    assert!(n >= 1);
    let (mut s, _) = Scaled::start(x);
    for m in 1..n {
        s.step(m, x);
    }
    s.cur / s.prev
}

/// L^2-normalized 1-D Hermite function `h_n(x)`.
pub fn hermite_eval(n: usize, x: f64) -> f64 {
    let (sign, log_abs) = log_abs_poly(n, x);
    if sign == 0.0 {
        return 0.0;
    }
    sign * (log_abs - 0.5 * x * x).exp()
}

/// All of `h_0(x), ..., h_{max_order}(x)` in one pass.
pub fn hermite_table(max_order: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_order + 1);
    let gauss = -0.5 * x * x;
    let (mut s, p0) = Scaled::start(x);
    out.push(p0 * gauss.exp());
    if max_order == 0 {
        return out;
    }
    out.push(s.cur * gauss.exp());
    for m in 1..max_order {
        s.step(m, x);
        out.push(s.cur * (s.log_scale + gauss).exp());
    }
    out
}

/// Multi-index `alpha` in N^d.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("multi-index needs at least one entry"));
        }
        Ok(MultiIndex(entries))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|alpha|`, the total order.
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex(v)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// `Phi_alpha(x) = prod_i h_{alpha_i}(x_i)`.
pub fn hermite_eval_multi(alpha: &MultiIndex, x: &[f64]) -> Result<f64> {
    if alpha.dim() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: alpha.dim(),
            got: x.len(),
        });
    }
    Ok(alpha
        .entries()
        .iter()
        .zip(x)
        .map(|(&n, &xi)| hermite_eval(n, xi))
        .product())
}

/// `int_R h_n(x) dx`: `sqrt(2 pi) (-1)^{n/2} h_n(0)` for even n, zero for odd n.
/// Follows from `F h_n = (-i)^n h_n` evaluated at the origin.
pub fn hermite_integral(n: usize) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
    sign * (2.0 * std::f64::consts::PI).sqrt() * hermite_eval(n, 0.0)
}

//! The `β = 1` heat kernel of the Hermite operator.
//!
//! ```text
//! K_t(x, y) = (2 pi sinh 2t)^{-d/2}
//!             exp(-coth(2t) (|x|^2 + |y|^2) / 2 + x.y / sinh 2t)
//! ```
//!
//! The kernel factors over coordinates, so the d-dimensional integral is
//! applied one axis at a time with a dense 1-D matrix.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hermite::QuadratureRule;

/// 1-D Mehler kernel.
fn kernel_1d(t: f64, x: f64, y: f64) -> f64 {
    let s = (2.0 * t).sinh();
    let coth = 1.0 / (2.0 * t).tanh();
    let norm = (2.0 * std::f64::consts::PI * s).powf(-0.5);
    norm * (-0.5 * coth * (x * x + y * y) + x * y / s).exp()
}

/// `K_t(x, y)` in any dimension.
pub fn mehler_kernel(t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("Mehler kernel is singular at t = 0"));
    }
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(x.iter().zip(y).map(|(&a, &b)| kernel_1d(t, a, b)).product())
}

/// `(e^{-tH} f)` at the tensor Gauss–Hermite nodes, given `f` at the same
/// nodes (row-major, last axis fastest, as in `SpectralGrid::gauss`).
///
/// The `y` integral uses the scaled weights `w_j e^{y_j^2}`, so the rule
/// must be fine enough to resolve the kernel width `~ sqrt(tanh t)`; a few
/// hundred points cover `t >= 0.05` for moderate degrees.
pub fn mehler_apply(samples: &[Complex64], dim: usize, t: f64, rule: &QuadratureRule) -> Result<Vec<Complex64>> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("Mehler application needs t > 0, got {t}")));
    }
    if dim == 0 || dim > 2 {
        return Err(Error::UnsupportedDimension(dim, "1 or 2"));
    }
    let n = rule.order();
    let total = n.pow(dim as u32);
    if samples.len() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            got: samples.len(),
        });
    }

    let nodes = rule.nodes();
    let w = rule.scaled_weights();
    let matrix: Vec<f64> = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            w[j] * kernel_1d(t, nodes[i], nodes[j])
        })
        .collect();
    let apply_row = |row: &[f64], v: &mut dyn Iterator<Item = Complex64>| -> Complex64 {
        row.iter().zip(v).fold(Complex64::new(0.0, 0.0), |acc, (&k, f)| acc + f * k)
    };

    match dim {
        1 => Ok((0..n)
            .into_par_iter()
            .map(|i| apply_row(&matrix[i * n..(i + 1) * n], &mut samples.iter().copied()))
            .collect()),
        _ => {
            // last axis
            let mut inner = vec![Complex64::new(0.0, 0.0); total];
            inner.par_chunks_mut(n).enumerate().for_each(|(j1, out)| {
                let slice = &samples[j1 * n..(j1 + 1) * n];
                for (i2, o) in out.iter_mut().enumerate() {
                    *o = apply_row(&matrix[i2 * n..(i2 + 1) * n], &mut slice.iter().copied());
                }
            });
            // first axis
            let mut out = vec![Complex64::new(0.0, 0.0); total];
            out.par_chunks_mut(n).enumerate().for_each(|(i1, row_out)| {
                let krow = &matrix[i1 * n..(i1 + 1) * n];
                for (j1, &k) in krow.iter().enumerate() {
                    let src = &inner[j1 * n..(j1 + 1) * n];
                    for (o, &v) in row_out.iter_mut().zip(src) {
                        *o += v * k;
                    }
                }
            });
            Ok(out)
        }
    }
}

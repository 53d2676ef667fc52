use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::window::Window;
use crate::error::{Error, Result};

/// Uniform grids over `[-L_x, L_x]^d` and `[-L_xi, L_xi]^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub dim: usize,
    pub x_extent: f64,
    pub xi_extent: f64,
    pub n_x: usize,
    pub n_xi: usize,
}

/// Symmetric uniform axis with exact mirror values.
pub(crate) fn symmetric_axis(extent: f64, n: usize) -> Vec<f64> {
    let h = 2.0 * extent / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| -extent + i as f64 * h).collect();
    for i in 0..n / 2 {
        v[n - 1 - i] = -v[i];
    }
    if n % 2 == 1 {
        v[n / 2] = 0.0;
    }
    v
}

/// Trapezoid weights on a uniform axis.
fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

/// Flat index -> per-axis indices, last axis fastest.
pub(crate) fn unflatten(mut flat: usize, n: usize, dim: usize) -> [usize; 2] {
    let mut idx = [0usize; 2];
    for axis in (0..dim).rev() {
        idx[axis] = flat % n;
        flat /= n;
    }
    idx
}

impl PhaseSpaceGrid {
    pub fn new(dim: usize, x_extent: f64, xi_extent: f64, n_x: usize, n_xi: usize) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::UnsupportedDimension(dim, "1 or 2"));
        }
        if !(x_extent > 0.0 && x_extent.is_finite() && xi_extent > 0.0 && xi_extent.is_finite()) {
            return Err(Error::invalid("grid extents must be positive and finite"));
        }
        if n_x < 2 || n_xi < 2 {
            return Err(Error::invalid("grids need at least 2 points per axis"));
        }
        Ok(PhaseSpaceGrid {
            dim,
            x_extent,
            xi_extent,
            n_x,
            n_xi,
        })
    }

    /// Same extent and resolution in `x` and `xi`.
    pub fn square(dim: usize, extent: f64, n: usize) -> Result<Self> {
        Self::new(dim, extent, extent, n, n)
    }

    /// `L = sqrt(2N + d) + 4`. In one dimension `n = 129`; in two the point
    /// count is the smallest odd value that still resolves the window, with
    /// a floor of 33, since the matrix has `n^4` entries.
    pub fn for_degree(dim: usize, degree: usize, window: &Window) -> Result<Self> {
        let extent = ((2 * degree + dim) as f64).sqrt() + 4.0;
        let n = if dim == 1 {
            129
        } else {
            let need = (2.0 * extent * window.essential_radius() / (0.95 * std::f64::consts::PI)).ceil() as usize + 1;
            let n = need.max(33);
            n + (1 - n % 2)
        };
        Self::square(dim, extent, n)
    }

    pub fn h_x(&self) -> f64 {
        2.0 * self.x_extent / (self.n_x - 1) as f64
    }

    pub fn h_xi(&self) -> f64 {
        2.0 * self.xi_extent / (self.n_xi - 1) as f64
    }

    pub fn x_axis(&self) -> Vec<f64> {
        symmetric_axis(self.x_extent, self.n_x)
    }

    pub fn xi_axis(&self) -> Vec<f64> {
        symmetric_axis(self.xi_extent, self.n_xi)
    }

    pub fn x_weights(&self) -> Vec<f64> {
        trapezoid_weights(self.n_x, self.h_x())
    }

    pub fn xi_weights(&self) -> Vec<f64> {
        trapezoid_weights(self.n_xi, self.h_xi())
    }

    /// Number of points in the `x` grid (`n_x^d`).
    pub fn x_count(&self) -> usize {
        self.n_x.pow(self.dim as u32)
    }

    pub fn xi_count(&self) -> usize {
        self.n_xi.pow(self.dim as u32)
    }

    pub fn x_point(&self, flat: usize, axis: &[f64]) -> Vec<f64> {
        let idx = unflatten(flat, self.n_x, self.dim);
        (0..self.dim).map(|a| axis[idx[a]]).collect()
    }

    pub fn xi_point(&self, flat: usize, axis: &[f64]) -> Vec<f64> {
        let idx = unflatten(flat, self.n_xi, self.dim);
        (0..self.dim).map(|a| axis[idx[a]]).collect()
    }

    /// Tensor trapezoid weights over the d-dimensional `x` grid.
    pub fn x_volume_weights(&self) -> Vec<f64> {
        tensor_weights(&self.x_weights(), self.dim)
    }

    pub fn xi_volume_weights(&self) -> Vec<f64> {
        tensor_weights(&self.xi_weights(), self.dim)
    }

    /// Halves both steps, keeping every existing node.
    pub fn refined(&self) -> Self {
        PhaseSpaceGrid {
            n_x: 2 * self.n_x - 1,
            n_xi: 2 * self.n_xi - 1,
            ..*self
        }
    }

    /// Short content hash identifying the grid in emitted records.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.dim as u64).to_le_bytes());
        h.update(self.x_extent.to_bits().to_le_bytes());
        h.update(self.xi_extent.to_bits().to_le_bytes());
        h.update((self.n_x as u64).to_le_bytes());
        h.update((self.n_xi as u64).to_le_bytes());
        hex::encode(&h.finalize()[..8])
    }

    /// Nyquist condition for a window of the given essential radius.
    pub fn check_resolution(&self, radius: f64) -> Result<()> {
        let product = self.h_xi() * radius;
        if product > std::f64::consts::PI {
            Err(Error::GridTooCoarse { product })
        } else {
            Ok(())
        }
    }
}

fn tensor_weights(w: &[f64], dim: usize) -> Vec<f64> {
    let n = w.len();
    (0..n.pow(dim as u32))
        .map(|flat| {
            let idx = unflatten(flat, n, dim);
            (0..dim).map(|a| w[idx[a]]).product()
        })
        .collect()
}

/// Sampled `V_g f` over the `x` grid times the `xi` grid.
/// Entry `(ix, ik)` lives at `ix * xi_count + ik`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceMatrix {
    pub grid: PhaseSpaceGrid,
    pub values: Vec<Complex64>,
}

impl PhaseSpaceMatrix {
    pub fn zeros(grid: PhaseSpaceGrid) -> Self {
        let len = grid.x_count() * grid.xi_count();
        PhaseSpaceMatrix {
            grid,
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn from_values(grid: PhaseSpaceGrid, values: Vec<Complex64>) -> Result<Self> {
        let len = grid.x_count() * grid.xi_count();
        if values.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: values.len(),
            });
        }
        Ok(PhaseSpaceMatrix { grid, values })
    }

    pub fn get(&self, ix: usize, ik: usize) -> Complex64 {
        self.values[ix * self.grid.xi_count() + ik]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermite::{hermite_table, HermiteExpansion};

/// STFT window: a 1-D Hermite expansion, used as a tensor product in higher
/// dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    profile: HermiteExpansion,
    label: String,
}

impl Window {
    /// Unit-norm Gaussian `Phi_0`.
    pub fn gaussian() -> Self {
        Window {
            profile: HermiteExpansion::from_real_1d(&[1.0]).expect("degree 0"),
            label: "gauss".into(),
        }
    }

    /// The Hermite function `Phi_n` as a window.
    pub fn hermite(n: usize) -> Result<Self> {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        Ok(Window {
            profile: HermiteExpansion::from_real_1d(&c)?,
            label: format!("hermite{n}"),
        })
    }

    pub fn from_profile(profile: HermiteExpansion, label: impl Into<String>) -> Result<Self> {
        if profile.dim() != 1 {
            return Err(Error::invalid("window profile must be one-dimensional"));
        }
        if profile.l2_norm() == 0.0 {
            return Err(Error::ZeroWindow);
        }
        Ok(Window {
            profile,
            label: label.into(),
        })
    }

    pub fn profile(&self) -> &HermiteExpansion {
        &self.profile
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, y: f64) -> Complex64 {
        let t = hermite_table(self.profile.degree(), y);
        t.iter()
            .zip(self.profile.coeffs())
            .fold(Complex64::new(0.0, 0.0), |acc, (&h, c)| acc + c * h)
    }

    /// Beyond this radius the window is below double precision.
    pub fn radius(&self) -> f64 {
        ((2 * self.profile.degree() + 1) as f64).sqrt() + 9.0
    }

    /// Radius holding the window's content to about 1e-8; used for the
    /// Nyquist check on the frequency step.
    pub fn essential_radius(&self) -> f64 {
        ((2 * self.profile.degree() + 1) as f64).sqrt() + 5.0
    }

    /// `||g||_{L^2(R^d)}`
    pub fn l2_norm(&self, dim: usize) -> f64 {
        self.profile.l2_norm().powi(dim as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_values() {
        let g = Window::gaussian();
        assert!((g.eval(0.0).re - 0.751_125_544_464_942_5).abs() < 1e-15);
        assert!(g.eval(g.radius()).norm() < 1e-18);
        assert_eq!(g.l2_norm(2), 1.0);
    }

    #[test]
    fn zero_window_rejected() {
        let z = HermiteExpansion::zeros(1, 2).unwrap();
        assert!(matches!(Window::from_profile(z, "z"), Err(Error::ZeroWindow)));
    }

    #[test]
    fn hermite_window_is_odd() {
        let g = Window::hermite(1).unwrap();
        assert_eq!(g.eval(0.0).norm(), 0.0);
        assert!((g.eval(0.8) + g.eval(-0.8)).norm() < 1e-16);
    }
}

//! Spectral toolkit for the Hermite operator `H = -Δ + |x|^2` on R^d.
//!
//! * [`hermite`]: Hermite functions, Gauss–Hermite quadrature, expansions.
//! * [`semigroup`]: `H^β` and `e^{-tH^β}` in the Hermite basis, plus the
//!   Mehler kernel for β = 1.
//! * [`phasespace`]: short-time Fourier transform, mixed norms, modulation
//!   and Wiener-amalgam norms.
//! * [`estimator`]: empirical decay / smoothing measurements for the
//!   semigroup on modulation spaces.
//! * [`solver`]: Duhamel/Picard solver for `∂_t u + H^β u = λ|u|^{2k}u`
//!   and the blow-up contrast experiment.

pub mod error;
pub mod estimator;
pub mod hermite;
pub mod numeric;
pub mod phasespace;
pub mod semigroup;
pub mod solver;

pub use error::{Error, Result};
pub use num_complex::Complex64;

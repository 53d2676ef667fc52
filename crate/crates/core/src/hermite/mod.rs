//! Hermite functions, Gauss–Hermite quadrature and truncated expansions.

pub mod expansion;
pub mod functions;
pub mod io;
pub mod quadrature;
pub mod transform;

pub use expansion::{HermiteBasis, HermiteExpansion};
pub use functions::{hermite_eval, hermite_eval_multi, hermite_integral, hermite_table, MultiIndex};
pub use quadrature::{gauss_hermite_rule, QuadratureRule, SpatialRule};
pub use transform::{analyze, synthesize, synthesize_1d, SpectralGrid};

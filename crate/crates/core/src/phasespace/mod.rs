//! Short-time Fourier transform, mixed phase-space norms and the Fourier
//! transform on Hermite expansions.

mod export;
mod grid;
mod norm;
mod stft;
mod window;

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::HermiteExpansion;

pub use export::{read_matrix, write_matrix, write_matrix_csv, NormRecord, MATRIX_MAGIC, MATRIX_VERSION};
pub use grid::{PhaseSpaceGrid, PhaseSpaceMatrix};
pub use norm::{mixed_norm, NormOrder, NormSpec};
pub use stft::{default_function_step, stft, ExpansionStft, SampledFunction, Signal};
pub use window::Window;

/// Serde helper writing infinite exponents as the string `"inf"`.
pub mod serde_exponent {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
                other => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {other:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FourierDirection {
    /// `c_alpha -> (-i)^{|alpha|} c_alpha`
    Forward,
    /// `c_alpha -> i^{|alpha|} c_alpha`
    Inverse,
}

/// Unitary Fourier transform, diagonal in the Hermite basis.
pub fn fourier_transform(e: &HermiteExpansion, direction: FourierDirection) -> HermiteExpansion {
    let unit = match direction {
        FourierDirection::Forward => Complex64::new(0.0, -1.0),
        FourierDirection::Inverse => Complex64::new(0.0, 1.0),
    };
    let powers = [
        Complex64::new(1.0, 0.0),
        unit,
        Complex64::new(-1.0, 0.0),
        -unit,
    ];
    e.map_by_order(|k| powers[k % 4])
}

fn require_order(spec: &NormSpec, order: NormOrder) -> Result<()> {
    if spec.order != order {
        return Err(Error::invalid(format!("norm spec has order {:?}, expected {order:?}", spec.order)));
    }
    Ok(())
}

fn signal_norm(f: &Signal, spec: &NormSpec, grid: &PhaseSpaceGrid, window: &Window) -> Result<f64> {
    if let Signal::Expansion(e) = f {
        if spec.is_l2() {
            grid.check_resolution(window.essential_radius())?;
            return ExpansionStft::new(grid.clone(), window.clone(), e.degree())?.l2_norm(e);
        }
    }
    let m = stft(f, window, grid)?;
    let v = mixed_norm(&m, spec);
    if !v.is_finite() {
        return Err(Error::NonFinite("mixed norm".into()));
    }
    Ok(v)
}

/// `||V_g f||_{L^{p,q}}` with `x` inner.
pub fn modulation_norm(f: &Signal, spec: &NormSpec, grid: &PhaseSpaceGrid, window: &Window) -> Result<f64> {
    require_order(spec, NormOrder::XInner)?;
    signal_norm(f, spec, grid, window)
}

/// `||V_g f||` with `xi` inner.
pub fn amalgam_norm(f: &Signal, spec: &NormSpec, grid: &PhaseSpaceGrid, window: &Window) -> Result<f64> {
    require_order(spec, NormOrder::XiInner)?;
    signal_norm(f, spec, grid, window)
}

type ConstantKey = (String, String, u64, u64, u64);

fn constant_cache() -> &'static Mutex<HashMap<ConstantKey, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<ConstantKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `amalgam_norm(g0) / modulation_norm(F g0)` for the Gaussian `g0`, the
/// constant in `||f||_W ~ c ||F f||_M`. Measured once per window, grid and
/// exponents, then cached.
pub fn duality_constant(p: f64, q: f64, s: f64, grid: &PhaseSpaceGrid, window: &Window) -> Result<f64> {
    let key = (window.label().to_string(), grid.hash(), p.to_bits(), q.to_bits(), s.to_bits());
    if let Some(&c) = constant_cache().lock().expect("cache poisoned").get(&key) {
        return Ok(c);
    }
    let gauss = HermiteExpansion::basis_function(&crate::hermite::MultiIndex::from(vec![0; grid.dim]), 0)?;
    let w = amalgam_norm(&gauss.clone().into(), &NormSpec::amalgam(p, q, s)?, grid, window)?;
    let f = fourier_transform(&gauss, FourierDirection::Forward);
    let m = modulation_norm(&f.into(), &NormSpec::modulation(p, q, s)?, grid, window)?;
    if m == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let c = w / m;
    constant_cache().lock().expect("cache poisoned").insert(key, c);
    Ok(c)
}

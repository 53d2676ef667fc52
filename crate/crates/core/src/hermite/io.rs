//! Expansion serialization.
//!
//! Binary container, all fields little-endian:
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 4    | magic `b"HXPN"`                         |
//! | 4      | 4    | format version (u32, currently 1)       |
//! | 8      | 4    | dimension d (u32)                       |
//! | 12     | 4    | degree N (u32)                          |
//! | 16     | 4    | ordering tag (u32, 1 = grlex)           |
//! | 20     | 8    | coefficient count (u64)                 |
//! | 28     | 16·n | coefficients as interleaved (re, im) f64 |
//!
//! The JSON mirror is `{"d", "N", "ordering": "grlex", "coeffs": [re, im, ...]}`.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::expansion::{HermiteBasis, HermiteExpansion};
use crate::error::{Error, Result};

pub const EXPANSION_MAGIC: &[u8; 4] = b"HXPN";
pub const FORMAT_VERSION: u32 = 1;
const ORDERING_GRLEX: u32 = 1;

pub fn write_expansion<W: Write>(e: &HermiteExpansion, mut w: W) -> Result<()> {
    w.write_all(EXPANSION_MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(e.dim() as u32).to_le_bytes())?;
    w.write_all(&(e.degree() as u32).to_le_bytes())?;
    w.write_all(&ORDERING_GRLEX.to_le_bytes())?;
    w.write_all(&(e.coeffs().len() as u64).to_le_bytes())?;
    for c in e.coeffs() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn expansion_to_bytes(e: &HermiteExpansion) -> Vec<u8> {
    let mut buf = Vec::with_capacity(28 + 16 * e.coeffs().len());
    write_expansion(e, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_expansion<R: Read>(mut r: R) -> Result<HermiteExpansion> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != EXPANSION_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dim = read_u32(&mut r)? as usize;
    let degree = read_u32(&mut r)? as usize;
    if read_u32(&mut r)? != ORDERING_GRLEX {
        return Err(Error::Format("unknown ordering tag".into()));
    }
    let mut nb = [0u8; 8];
    r.read_exact(&mut nb)?;
    let count = u64::from_le_bytes(nb) as usize;
    let basis = HermiteBasis::shared(dim, degree)?;
    if count != basis.len() {
        return Err(Error::Format(format!(
            "coefficient count {count} does not match d={dim}, N={degree}"
        )));
    }
    let mut coeffs = Vec::with_capacity(count);
    for _ in 0..count {
        let re = read_f64(&mut r)?;
        let im = read_f64(&mut r)?;
        coeffs.push(Complex64::new(re, im));
    }
    HermiteExpansion::from_coeffs(basis, coeffs)
}

/// JSON mirror of the binary container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRecord {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub ordering: String,
    pub coeffs: Vec<f64>,
}

impl From<&HermiteExpansion> for ExpansionRecord {
    fn from(e: &HermiteExpansion) -> Self {
        ExpansionRecord {
            d: e.dim(),
            n: e.degree(),
            ordering: "grlex".into(),
            coeffs: e.coeffs().iter().flat_map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl TryFrom<ExpansionRecord> for HermiteExpansion {
    type Error = Error;

    fn try_from(r: ExpansionRecord) -> Result<Self> {
        if r.ordering != "grlex" {
            return Err(Error::Format(format!("unknown ordering {:?}", r.ordering)));
        }
        if r.coeffs.len() % 2 != 0 {
            return Err(Error::Format("odd number of interleaved values".into()));
        }
        let basis = HermiteBasis::shared(r.d, r.n)?;
        let coeffs = r
            .coeffs
            .chunks(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        HermiteExpansion::from_coeffs(basis, coeffs)
    }
}

pub fn expansion_to_json(e: &HermiteExpansion) -> Result<String> {
    Ok(serde_json::to_string(&ExpansionRecord::from(e))?)
}

pub fn expansion_from_json(s: &str) -> Result<HermiteExpansion> {
    let rec: ExpansionRecord = serde_json::from_str(s)?;
    rec.try_into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let e = HermiteExpansion::from_real_1d(&[1.5, -2.0]).unwrap();
        let b = expansion_to_bytes(&e);
        assert_eq!(&b[0..4], b"HXPN");
        assert_eq!(u32::from_le_bytes(b[8..12].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(b[12..16].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(b[20..28].try_into().unwrap()), 2);
        assert_eq!(f64::from_le_bytes(b[28..36].try_into().unwrap()), 1.5);
        assert_eq!(b.len(), 28 + 32);
    }

    #[test]
    fn rejects_corrupt_input() {
        let e = HermiteExpansion::from_real_1d(&[1.0]).unwrap();
        let mut b = expansion_to_bytes(&e);
        b[0] = b'X';
        assert!(read_expansion(&b[..]).is_err());
        let b = expansion_to_bytes(&e);
        assert!(read_expansion(&b[..b.len() - 3]).is_err());
        assert!(expansion_from_json(r#"{"d":1,"N":0,"ordering":"lex","coeffs":[1,0]}"#).is_err());
    }

    proptest! {
        #[test]
        fn binary_and_json_round_trip(
            dim in 1usize..=3,
            degree in 0usize..=5,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let basis = HermiteBasis::shared(dim, degree).unwrap();
            let coeffs = (0..basis.len())
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() * 1e-300))
                .collect();
            let e = HermiteExpansion::from_coeffs(basis, coeffs).unwrap();
            let b = expansion_to_bytes(&e);
            prop_assert_eq!(read_expansion(&b[..]).unwrap(), e.clone());
            let j = expansion_to_json(&e).unwrap();
            prop_assert_eq!(expansion_from_json(&j).unwrap(), e);
        }
    }
}

//! Phase-space matrix export.
//!
//! Binary layout (little-endian):
//!
//! ```text
//! magic    b"HPSM"
//! version  u32 = 1
//! d        u32
//! n_x      u32
//! n_xi     u32
//! L_x      f64
//! L_xi     f64
//! count    u64           number of complex entries
//! values   count x (re f64, im f64), x-major, xi fastest
//! ```

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{PhaseSpaceGrid, PhaseSpaceMatrix};
use super::norm::{NormOrder, NormSpec};
use crate::error::{Error, Result};

pub const MATRIX_MAGIC: &[u8; 4] = b"HPSM";
pub const MATRIX_VERSION: u32 = 1;

/// CSV with columns `x1[,x2],xi1[,xi2],re,im`.
pub fn write_matrix_csv<W: Write>(m: &PhaseSpaceMatrix, mut w: W) -> Result<()> {
    let g = &m.grid;
    let mut header: Vec<String> = (1..=g.dim).map(|i| format!("x{i}")).collect();
    header.extend((1..=g.dim).map(|i| format!("xi{i}")));
    header.push("re".into());
    header.push("im".into());
    writeln!(w, "{}", header.join(","))?;
    let xa = g.x_axis();
    let ka = g.xi_axis();
    let nk = g.xi_count();
    for ix in 0..g.x_count() {
        let x = g.x_point(ix, &xa);
        for ik in 0..nk {
            let k = g.xi_point(ik, &ka);
            let v = m.values[ix * nk + ik];
            for c in x.iter().chain(&k) {
                write!(w, "{c},")?;
            }
            writeln!(w, "{},{}", v.re, v.im)?;
        }
    }
    Ok(())
}

pub fn write_matrix<W: Write>(m: &PhaseSpaceMatrix, mut w: W) -> Result<()> {
    let g = &m.grid;
    w.write_all(MATRIX_MAGIC)?;
    w.write_all(&MATRIX_VERSION.to_le_bytes())?;
    for v in [g.dim, g.n_x, g.n_xi] {
        w.write_all(&(v as u32).to_le_bytes())?;
    }
    w.write_all(&g.x_extent.to_le_bytes())?;
    w.write_all(&g.xi_extent.to_le_bytes())?;
    w.write_all(&(m.values.len() as u64).to_le_bytes())?;
    for v in &m.values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)
        .map_err(|e| Error::Format(format!("truncated header: {e}")))?;
    Ok(b)
}

pub fn read_matrix<R: Read>(mut r: R) -> Result<PhaseSpaceMatrix> {
    if &read_array::<4, _>(&mut r)? != MATRIX_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != MATRIX_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dim = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let n_x = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let n_xi = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let x_extent = f64::from_le_bytes(read_array(&mut r)?);
    let xi_extent = f64::from_le_bytes(read_array(&mut r)?);
    let count = u64::from_le_bytes(read_array(&mut r)?) as usize;
    let grid = PhaseSpaceGrid::new(dim, x_extent, xi_extent, n_x, n_xi).map_err(|e| Error::Format(e.to_string()))?;
    if count != grid.x_count() * grid.xi_count() {
        return Err(Error::Format(format!("count {count} does not match the grid")));
    }
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let re = f64::from_le_bytes(read_array(&mut r).map_err(|_| Error::Format("truncated values".into()))?);
        let im = f64::from_le_bytes(read_array(&mut r).map_err(|_| Error::Format("truncated values".into()))?);
        values.push(Complex64::new(re, im));
    }
    PhaseSpaceMatrix::from_values(grid, values)
}

/// One emitted norm value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    #[serde(with = "super::serde_exponent")]
    pub p: f64,
    #[serde(with = "super::serde_exponent")]
    pub q: f64,
    pub s: f64,
    pub order: NormOrder,
    pub value: f64,
    pub grid_hash: String,
}

impl NormRecord {
    pub fn new(spec: &NormSpec, value: f64, grid: &PhaseSpaceGrid) -> Self {
        NormRecord {
            p: spec.p,
            q: spec.q,
            s: spec.s,
            order: spec.order,
            value,
            grid_hash: grid.hash(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PhaseSpaceMatrix {
        let g = PhaseSpaceGrid::new(1, 1.0, 2.0, 3, 2).unwrap();
        let v = (0..6).map(|i| Complex64::new(i as f64, -0.5 * i as f64)).collect();
        PhaseSpaceMatrix::from_values(g, v).unwrap()
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_matrix_csv(&sample(), &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "x1,xi1,re,im");
        assert_eq!(lines[1], "-1,-2,0,-0");
        assert_eq!(lines[6], "1,2,5,-2.5");
        assert_eq!(lines.len(), 7);
    }

    #[test]
    fn binary_round_trip() {
        let m = sample();
        let mut buf = Vec::new();
        write_matrix(&m, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"HPSM");
        assert_eq!(buf.len(), 4 + 16 + 16 + 8 + 6 * 16);
        assert_eq!(read_matrix(&buf[..]).unwrap(), m);
        assert!(read_matrix(&buf[..buf.len() - 3]).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_matrix(&bad[..]).is_err());
    }

    #[test]
    fn record_json() {
        let spec = NormSpec::modulation(f64::INFINITY, 1.0, 0.0).unwrap();
        let r = NormRecord::new(&spec, 1.5, &sample().grid);
        let j = serde_json::to_string(&r).unwrap();
        assert!(j.starts_with(r#"{"p":"inf","q":1.0,"s":0.0,"order":"x-inner","value":1.5,"grid_hash":""#));
        assert_eq!(serde_json::from_str::<NormRecord>(&j).unwrap(), r);
    }
}

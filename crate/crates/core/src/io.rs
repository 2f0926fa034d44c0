//! JSA interchange: CSV (`omega_a,omega_b,re,im`, row-major) and the
//! `BJSA1` little-endian binary format.

use std::io::{BufRead, Read, Write};

use nalgebra::DMatrix;

use crate::photon_state::{Exchange, FrequencyGrid, Jsa};
use crate::{Error, Result, C64};

const MAGIC: &[u8; 5] = b"BJSA1";

pub fn write_jsa_csv<W: Write>(jsa: &Jsa, mut w: W) -> Result<()> {
    writeln!(w, "omega_a,omega_b,re,im")?;
    for i in 0..jsa.grid_a.n_points {
        for j in 0..jsa.grid_b.n_points {
            let z = jsa.amplitude[(i, j)];
            writeln!(w, "{:e},{:e},{:e},{:e}", jsa.grid_a.value(i), jsa.grid_b.value(j), z.re, z.im)?;
        }
    }
    Ok(())
}

/// Reads a row-major CSV; the grids are recovered from the first/last
/// coordinates and must be uniform.
pub fn read_jsa_csv<R: BufRead>(r: R) -> Result<Jsa> {
    let mut rows = Vec::new();
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        if k == 0 {
            if line.trim() != "omega_a,omega_b,re,im" {
                return Err(Error::Format(format!("unexpected JSA header `{line}`")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Format(format!("line {}: {e}", k + 1)))?;
        if v.len() != 4 {
            return Err(Error::Format(format!("line {}: expected 4 columns", k + 1)));
        }
        rows.push(v);
    }
    if rows.is_empty() {
        return Err(Error::Format("empty JSA file".into()));
    }
    let nb = rows.iter().take_while(|r| r[0] == rows[0][0]).count();
    if nb < 2 || rows.len() % nb != 0 {
        return Err(Error::Format("JSA rows do not form a rectangular grid".into()));
    }
    let na = rows.len() / nb;
    let grid_a = FrequencyGrid::new(rows[0][0], rows[rows.len() - 1][0], na)?;
    let grid_b = FrequencyGrid::new(rows[0][1], rows[nb - 1][1], nb)?;
    let amplitude = DMatrix::from_fn(na, nb, |i, j| {
        let r = &rows[i * nb + j];
        C64::new(r[2], r[3])
    });
    Ok(Jsa { grid_a, grid_b, amplitude, exchange: Exchange::Unsymmetrized })
}

fn put_grid<W: Write>(w: &mut W, g: &FrequencyGrid) -> Result<()> {
    w.write_all(&g.omega_min.to_le_bytes())?;
    w.write_all(&g.omega_max.to_le_bytes())?;
    w.write_all(&(g.n_points as u64).to_le_bytes())?;
    Ok(())
}

fn get8<R: Read>(r: &mut R) -> Result<[u8; 8]> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(b)
}

fn get_grid<R: Read>(r: &mut R) -> Result<FrequencyGrid> {
    let lo = f64::from_le_bytes(get8(r)?);
    let hi = f64::from_le_bytes(get8(r)?);
    let n = u64::from_le_bytes(get8(r)?);
    FrequencyGrid::new(lo, hi, n as usize)
}

pub fn write_jsa_binary<W: Write>(jsa: &Jsa, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    put_grid(&mut w, &jsa.grid_a)?;
    put_grid(&mut w, &jsa.grid_b)?;
    for i in 0..jsa.grid_a.n_points {
        for j in 0..jsa.grid_b.n_points {
            let z = jsa.amplitude[(i, j)];
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_jsa_binary<R: Read>(mut r: R) -> Result<Jsa> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("missing BJSA1 magic".into()));
    }
    let grid_a = get_grid(&mut r)?;
    let grid_b = get_grid(&mut r)?;
    let mut amplitude = DMatrix::zeros(grid_a.n_points, grid_b.n_points);
    for i in 0..grid_a.n_points {
        for j in 0..grid_b.n_points {
            let re = f64::from_le_bytes(get8(&mut r)?);
            let im = f64::from_le_bytes(get8(&mut r)?);
            amplitude[(i, j)] = C64::new(re, im);
        }
    }
    Ok(Jsa { grid_a, grid_b, amplitude, exchange: Exchange::Unsymmetrized })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photon_state::*;

    fn sample() -> Jsa {
        let g = FrequencyGrid::new(1.9, 2.1, 7).unwrap();
        let pump = PumpParams::new(4.0, 0.03).unwrap();
        let pm = PhaseMatchParams::new(2.0, 2.0, 6.1, 23.0).unwrap();
        symmetrize(&build_jsa(g, g, &pump, &pm), 0.7).unwrap()
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let jsa = sample();
        let mut buf = Vec::new();
        write_jsa_binary(&jsa, &mut buf).unwrap();
        assert_eq!(buf.len(), 5 + 48 + 49 * 16);
        let back = read_jsa_binary(&buf[..]).unwrap();
        assert_eq!(back.amplitude, jsa.amplitude);
        assert_eq!(back.grid_a, jsa.grid_a);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let jsa = sample();
        let mut buf = Vec::new();
        write_jsa_csv(&jsa, &mut buf).unwrap();
        let back = read_jsa_csv(&buf[..]).unwrap();
        assert_eq!(back.amplitude, jsa.amplitude);
        assert_eq!(back.grid_b.n_points, 7);
    }

    #[test]
    fn bad_magic_rejected() {
        assert!(read_jsa_binary(&b"XJSA1...."[..]).is_err());
    }
}

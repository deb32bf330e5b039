//! Binary field snapshots.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |---|---|
//! | 4 | magic `NSMX` |
//! | 4 | format version (`u32`, currently 1) |
//! | 4 | `n` (`u32`) |
//! | 8 | `L` (`f64`) |
//! | 4 | field count (`u32`) |
//!
//! followed, field by field, by every lattice mode in lexicographic order of
//! the storage index `(i0, i1, i2)` (axis index `i` holds mode `i` for
//! `i <= n/2` and `i - n` otherwise), each mode as three complex `f64`
//! values stored as `re, im` pairs.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};
use crate::spectral::field::{LatticeRef, SpectralField};
use crate::spectral::lattice::FrequencyLattice;

pub const MAGIC: &[u8; 4] = b"NSMX";
pub const VERSION: u32 = 1;

pub fn write_snapshot<T: Real, W: Write>(mut w: W, fields: &[&SpectralField<T>]) -> Result<()> {
    let lat = match fields.first() {
        Some(f) => f.lattice().clone(),
        None => return Err(Error::Empty("snapshot needs at least one field".into())),
    };
    for f in fields {
        if !f.lattice().same_as(&lat) {
            return Err(Error::LatticeMismatch("snapshot fields must share a lattice".into()));
        }
    }
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(lat.n() as u32).to_le_bytes())?;
    w.write_all(&lat.length().as_f64().to_le_bytes())?;
    w.write_all(&(fields.len() as u32).to_le_bytes())?;
    let mut buf = Vec::with_capacity(lat.len() * 48);
    for f in fields {
        buf.clear();
        for idx in 0..lat.len() {
            for z in f.at(idx) {
                buf.extend_from_slice(&z.re.as_f64().to_le_bytes());
                buf.extend_from_slice(&z.im.as_f64().to_le_bytes());
            }
        }
        w.write_all(&buf)?;
    }
    Ok(())
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

/// Reads a snapshot, returning its lattice and fields.
pub fn read_snapshot<T: Real, R: Read>(mut r: R) -> Result<(LatticeRef<T>, Vec<SpectralField<T>>)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad snapshot magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported snapshot version {version}")));
    }
    let n = read_u32(&mut r)? as usize;
    let length = read_f64(&mut r)?;
    let count = read_u32(&mut r)? as usize;
    let lat = FrequencyLattice::new(n, T::lit(length))?;
    let mut fields = Vec::with_capacity(count);
    let mut raw = vec![0u8; lat.len() * 48];
    for _ in 0..count {
        r.read_exact(&mut raw)?;
        let mut f = SpectralField::zeros(&lat);
        for idx in 0..lat.len() {
            let mut v = [Cplx::default(); 3];
            for (c, z) in v.iter_mut().enumerate() {
                let o = idx * 48 + c * 16;
                let re = f64::from_le_bytes(raw[o..o + 8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(raw[o + 8..o + 16].try_into().expect("8 bytes"));
                *z = Cplx::new(T::lit(re), T::lit(im));
            }
            f.set(idx, v);
        }
        fields.push(f);
    }
    Ok((lat, fields))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::lattice::Band;
    use crate::spectral::random::random_field;

    #[test]
    fn snapshot_roundtrip_is_bitwise() {
        let lat = FrequencyLattice::<f64>::new(8, 4.0).unwrap();
        let a = random_field(&lat, 2.0, 3, true, Band::Full).unwrap();
        let b = random_field(&lat, 3.0, 4, false, Band::Full).unwrap();
        let mut bytes = Vec::new();
        write_snapshot(&mut bytes, &[&a, &b]).unwrap();
        assert_eq!(bytes.len(), 24 + 2 * 512 * 48);
        let (lat2, fs) = read_snapshot::<f64, _>(bytes.as_slice()).unwrap();
        assert!(lat2.same_as(&lat));
        assert_eq!(fs[0].max_diff(&a), 0.0);
        assert_eq!(fs[1].max_diff(&b), 0.0);
    }

    #[test]
    fn rejects_bad_magic() {
        let bytes = b"XXXX\x01\0\0\0".to_vec();
        assert!(read_snapshot::<f64, _>(bytes.as_slice()).is_err());
    }
}

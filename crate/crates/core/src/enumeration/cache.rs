//! Binary cache of an enumerated ball.
//!
//! Layout (little endian): magic `KLAT`, format version `u32`, lattice code
//! `u8`, gauge code `u8`, radius `f64`, element count `u64`, integers per
//! element `u32`, then the flat `i64` entries.

use super::{LatticeId, LatticeSpec};
use crate::algebra::{ExactAffine, ExactMatrix, GaussianInt, LatticeElement, NormGauge};
use crate::error::{Error, Result};
use std::io::{Read, Write};

const MAGIC: &[u8; 4] = b"KLAT";
const VERSION: u32 = 1;

pub fn write_cache<W: Write>(
    mut w: W,
    spec: LatticeSpec,
    radius: f64,
    elements: &[LatticeElement],
) -> Result<()> {
    let per = spec.id.flat_len();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[spec.id.code(), spec.gauge.code()])?;
    w.write_all(&radius.to_le_bytes())?;
    w.write_all(&(elements.len() as u64).to_le_bytes())?;
    w.write_all(&(per as u32).to_le_bytes())?;
    for g in elements {
        let flat = g.flat_entries();
        if flat.len() != per {
            return Err(Error::DimensionMismatch { expected: per, got: flat.len() });
        }
        for x in flat {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn decode(id: LatticeId, flat: &[i64]) -> Result<LatticeElement> {
    let n = id.linear_dim();
    let entries: Vec<GaussianInt> = match id.field() {
        crate::algebra::FieldTag::Real => flat.iter().map(|&x| GaussianInt::int(x)).collect(),
        crate::algebra::FieldTag::Complex => flat.chunks(2).map(|c| GaussianInt::new(c[0], c[1])).collect(),
    };
    let linear = ExactMatrix::new(n, id.field(), entries[..n * n].to_vec())?;
    if id.is_affine() {
        Ok(LatticeElement::Affine(ExactAffine::new(linear, entries[n * n..].to_vec())?))
    } else {
        Ok(LatticeElement::Linear(linear))
    }
}

pub fn read_cache<R: Read>(mut r: R) -> Result<(LatticeSpec, f64, Vec<LatticeElement>)> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::Io("not an enumeration cache".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(Error::Io(format!("unsupported cache version {version}")));
    }
    let [lat, gauge] = read_array::<2, _>(&mut r)?;
    let spec = LatticeSpec::new(LatticeId::from_code(lat)?, NormGauge::from_code(gauge)?);
    let radius = f64::from_le_bytes(read_array(&mut r)?);
    let count = u64::from_le_bytes(read_array(&mut r)?) as usize;
    let per = u32::from_le_bytes(read_array(&mut r)?) as usize;
    if per != spec.id.flat_len() {
        return Err(Error::DimensionMismatch { expected: spec.id.flat_len(), got: per });
    }
    let mut elements = Vec::with_capacity(count);
    let mut flat = vec![0i64; per];
    for _ in 0..count {
        for x in flat.iter_mut() {
            *x = i64::from_le_bytes(read_array(&mut r)?);
        }
        elements.push(decode(spec.id, &flat)?);
    }
    Ok((spec, radius, elements))
}

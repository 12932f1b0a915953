//! Binary field container.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 6 | magic `DSLAB1` |
//! | 1 | dims `d` (1..=3) |
//! | 1 | complex flag (1 complex, 0 real) |
//! | 25·d | per axis: f64 min, f64 max, u64 n, u8 periodic |
//! | 8 | f64 dt |
//! | 8 | f64 time_label |
//! | 4 | u32 metadata length `m` |
//! | m | UTF-8 metadata (`key=value` pairs separated by `;`) |
//! | … | row-major samples: f64 (re, im) pairs, or single f64 when real |

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{Axis, ComplexScalarField, GridSpec, RealField, SpacetimeError};

pub const MAGIC: &[u8; 6] = b"DSLAB1";

#[derive(Debug, Clone, PartialEq)]
pub enum ContainerValues {
    Complex(Vec<Complex64>),
    Real(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Container {
    pub grid: GridSpec,
    pub time_label: f64,
    pub metadata: String,
    pub values: ContainerValues,
}

impl Container {
    pub fn into_complex(self) -> Result<ComplexScalarField, SpacetimeError> {
        match self.values {
            ContainerValues::Complex(v) => ComplexScalarField::new(self.grid, v, self.time_label),
            ContainerValues::Real(_) => Err(SpacetimeError::Container("payload is real".into())),
        }
    }

    pub fn into_real(self) -> Result<RealField, SpacetimeError> {
        match self.values {
            ContainerValues::Real(v) => RealField::new(self.grid, v, self.time_label),
            ContainerValues::Complex(_) => Err(SpacetimeError::Container("payload is complex".into())),
        }
    }
}

fn write_header(
    w: &mut impl Write,
    grid: &GridSpec,
    complex: bool,
    time_label: f64,
    metadata: &str,
) -> Result<(), SpacetimeError> {
    w.write_all(MAGIC)?;
    w.write_all(&[grid.dims() as u8, complex as u8])?;
    for a in grid.axes() {
        w.write_all(&a.min.to_le_bytes())?;
        w.write_all(&a.max.to_le_bytes())?;
        w.write_all(&(a.n as u64).to_le_bytes())?;
        w.write_all(&[a.periodic as u8])?;
    }
    w.write_all(&grid.dt().to_le_bytes())?;
    w.write_all(&time_label.to_le_bytes())?;
    let meta = metadata.as_bytes();
    let len = u32::try_from(meta.len()).map_err(|_| SpacetimeError::Container("metadata too long".into()))?;
    w.write_all(&len.to_le_bytes())?;
    w.write_all(meta)?;
    Ok(())
}

pub fn write_complex(w: &mut impl Write, f: &ComplexScalarField, metadata: &str) -> Result<(), SpacetimeError> {
    write_header(w, &f.grid, true, f.time_label, metadata)?;
    let mut buf = Vec::with_capacity(16 * f.values.len());
    for v in &f.values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn write_real(w: &mut impl Write, f: &RealField, metadata: &str) -> Result<(), SpacetimeError> {
    write_header(w, &f.grid, false, f.time_label, metadata)?;
    let mut buf = Vec::with_capacity(8 * f.values.len());
    for v in &f.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn take<const N: usize>(r: &mut impl Read) -> Result<[u8; N], SpacetimeError> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(|e| SpacetimeError::Container(format!("truncated header: {e}")))?;
    Ok(b)
}

fn f64_at(r: &mut impl Read) -> Result<f64, SpacetimeError> {
    Ok(f64::from_le_bytes(take::<8>(r)?))
}

pub fn read_container(r: &mut impl Read) -> Result<Container, SpacetimeError> {
    if &take::<6>(r)? != MAGIC {
        return Err(SpacetimeError::Container("bad magic".into()));
    }
    let [dims, complex] = take::<2>(r)?;
    if !(1..=3).contains(&dims) || complex > 1 {
        return Err(SpacetimeError::Container(format!("bad dims/flag {dims}/{complex}")));
    }
    let mut axes = Vec::new();
    for _ in 0..dims {
        let min = f64_at(r)?;
        let max = f64_at(r)?;
        let n = u64::from_le_bytes(take::<8>(r)?) as usize;
        let periodic = take::<1>(r)?[0] != 0;
        axes.push(Axis::new(min, max, n, periodic));
    }
    let dt = f64_at(r)?;
    let time_label = f64_at(r)?;
    let grid = GridSpec::new(axes, dt)?;
    let mlen = u32::from_le_bytes(take::<4>(r)?) as usize;
    let mut meta = vec![0u8; mlen];
    r.read_exact(&mut meta).map_err(|e| SpacetimeError::Container(format!("truncated metadata: {e}")))?;
    let metadata = String::from_utf8(meta).map_err(|_| SpacetimeError::Container("metadata not UTF-8".into()))?;
    let width = if complex == 1 { 16 } else { 8 };
    let mut data = vec![0u8; grid.len() * width];
    r.read_exact(&mut data).map_err(|e| SpacetimeError::Container(format!("truncated payload: {e}")))?;
    let f = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("8-byte chunk"));
    let values = if complex == 1 {
        ContainerValues::Complex(data.chunks_exact(16).map(|c| Complex64::new(f(&c[..8]), f(&c[8..]))).collect())
    } else {
        ContainerValues::Real(data.chunks_exact(8).map(f).collect())
    };
    Ok(Container { grid, time_label, metadata, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_complex_and_real() {
        let g = GridSpec::new(vec![Axis::new(0.0, 1.0, 9, false), Axis::new(-1.0, 1.0, 8, true)], 0.25).unwrap();
        let f = ComplexScalarField::from_fn(g.clone(), 1.5, |p| Complex64::new(p[0], -p[1]));
        let mut buf = Vec::new();
        write_complex(&mut buf, &f, "run_id=x;seed=3").unwrap();
        assert_eq!(&buf[..6], b"DSLAB1");
        let c = read_container(&mut buf.as_slice()).unwrap();
        assert_eq!(c.metadata, "run_id=x;seed=3");
        assert_eq!(c.into_complex().unwrap(), f);

        let r = RealField::from_fn(g, 2.0, |p| p[0] * p[1]);
        let mut buf = Vec::new();
        write_real(&mut buf, &r, "").unwrap();
        assert_eq!(read_container(&mut buf.as_slice()).unwrap().into_real().unwrap(), r);
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        assert!(read_container(&mut &b"DSLAB2xxxxxxxx"[..]).is_err());
        let g = GridSpec::line(0.0, 1.0, 8, false, 0.1).unwrap();
        let f = RealField::from_fn(g, 0.0, |_| 1.0);
        let mut buf = Vec::new();
        write_real(&mut buf, &f, "").unwrap();
        buf.truncate(buf.len() - 3);
        assert!(read_container(&mut buf.as_slice()).is_err());
    }
}

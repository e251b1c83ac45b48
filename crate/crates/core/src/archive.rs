//! Binary snapshots and trajectory archives.
//!
//! A snapshot is `b"NLSF"`, a little-endian `u32` version, `u32` samples per axis,
//! `f64` box length, then `n^2` little-endian `(re, im)` pairs of `f64`.
//! A trajectory archive is a directory of snapshots plus `index.json`
//! holding `{dt, stride, times}`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::{Error, Field, Grid, Result, Scalar, Trajectory};

pub const MAGIC: &[u8; 4] = b"NLSF";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8;

pub fn encode_snapshot<T: Scalar>(field: &Field<T>) -> Result<Vec<u8>> {
    let grid = field.grid();
    if grid.dims() != 2 {
        return Err(Error::Format("snapshots hold two-dimensional fields only".into()));
    }
    let n = u32::try_from(grid.n()).map_err(|_| Error::Format("grid too large".into()))?;
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * field.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&n.to_le_bytes());
    out.extend_from_slice(&grid.box_length().as_f64().to_le_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.re.as_f64().to_le_bytes());
        out.extend_from_slice(&v.im.as_f64().to_le_bytes());
    }
    Ok(out)
}

pub fn decode_snapshot<T: Scalar>(bytes: &[u8]) -> Result<Field<T>> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format("truncated header".into()));
    }
    if &bytes[0..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let word = |k: usize| u32::from_le_bytes(bytes[k..k + 4].try_into().unwrap());
    let version = word(4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let n = word(8) as usize;
    let box_length = f64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let expected = HEADER_LEN + 16 * n * n;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "expected {expected} bytes for n = {n}, found {}",
            bytes.len()
        )));
    }
    let grid = Grid::new_2d(n, T::lit(box_length))?;
    let values = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[0..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..16].try_into().unwrap());
            Complex::new(T::lit(re), T::lit(im))
        })
        .collect();
    Field::new(&grid, values)
}

pub fn write_snapshot<T: Scalar>(path: impl AsRef<Path>, field: &Field<T>) -> Result<()> {
    let bytes = encode_snapshot(field)?;
    let mut f = fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}

pub fn read_snapshot<T: Scalar>(path: impl AsRef<Path>) -> Result<Field<T>> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_snapshot(&bytes)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchiveIndex {
    pub dt: f64,
    pub stride: usize,
    pub times: Vec<f64>,
}

fn snapshot_name(k: usize) -> String {
    format!("snapshot_{k:06}.nlsf")
}

pub fn write_trajectory<T: Scalar>(dir: impl AsRef<Path>, traj: &Trajectory<T>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    for (k, f) in traj.fields().iter().enumerate() {
        write_snapshot(dir.join(snapshot_name(k)), f)?;
    }
    let index = ArchiveIndex {
        dt: traj.dt().as_f64(),
        stride: traj.stride(),
        times: traj.times().iter().map(|t| t.as_f64()).collect(),
    };
    fs::write(dir.join("index.json"), serde_json::to_string_pretty(&index)?)?;
    Ok(())
}

pub fn read_trajectory<T: Scalar>(dir: impl AsRef<Path>) -> Result<Trajectory<T>> {
    let dir = dir.as_ref();
    let index: ArchiveIndex = serde_json::from_str(&fs::read_to_string(dir.join("index.json"))?)?;
    let fields = (0..index.times.len())
        .map(|k| read_snapshot(dir.join(snapshot_name(k))))
        .collect::<Result<Vec<Field<T>>>>()?;
    Trajectory::new(
        index.times.iter().map(|&t| T::lit(t)).collect(),
        fields,
        T::lit(index.dt),
        index.stride,
    )
}

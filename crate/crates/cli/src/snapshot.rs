//! Field snapshot files: a short ASCII header followed by a little-endian
//! `f64` payload in row-major order (axis 0 slowest).
//!
//! ```text
//! active-scalar-snapshot 1
//! d 2
//! n 64
//! t 0.5
//! step 500
//! space spectral
//! layout row-major
//! element f64-le
//! end
//! <payload>
//! ```
//!
//! Physical payloads hold `n^d` values; spectral payloads hold `n^d`
//! `(re, im)` pairs.

use std::fs;
use std::io::{self, BufRead, Read, Write};
use std::path::Path;

use active_scalar::spectral::{PhysicalField, SpectralField, TorusGrid};
use active_scalar::Complex64;

use crate::config::Space;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "active-scalar-snapshot";

#[derive(Debug, Clone, PartialEq)]
pub enum SnapshotData {
    Physical(PhysicalField),
    Spectral(SpectralField),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFile {
    pub t: f64,
    pub step: u64,
    pub data: SnapshotData,
}

impl SnapshotFile {
    pub fn grid(&self) -> &TorusGrid {
        match &self.data {
            SnapshotData::Physical(f) => f.grid(),
            SnapshotData::Spectral(f) => f.grid(),
        }
    }

    pub fn space(&self) -> Space {
        match self.data {
            SnapshotData::Physical(_) => Space::Physical,
            SnapshotData::Spectral(_) => Space::Spectral,
        }
    }

    /// The field in spectral form, transforming physical payloads.
    pub fn to_spectral(&self) -> io::Result<SpectralField> {
        match &self.data {
            SnapshotData::Spectral(f) => Ok(f.clone()),
            SnapshotData::Physical(f) => active_scalar::spectral::to_spectral(f).map_err(invalid),
        }
    }
}

fn invalid(e: impl ToString) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, e.to_string())
}

pub fn encode(snap: &SnapshotFile) -> Vec<u8> {
    let grid = snap.grid();
    let mut out = format!(
        "{MAGIC} {FORMAT_VERSION}\nd {}\nn {}\nt {:?}\nstep {}\nspace {}\nlayout row-major\nelement f64-le\nend\n",
        grid.dim(),
        grid.n(),
        snap.t,
        snap.step,
        snap.space().as_str()
    )
    .into_bytes();
    match &snap.data {
        SnapshotData::Physical(f) => {
            out.reserve(8 * f.values().len());
            for v in f.values() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        SnapshotData::Spectral(f) => {
            out.reserve(16 * f.coeffs().len());
            for c in f.coeffs() {
                out.extend_from_slice(&c.re.to_le_bytes());
                out.extend_from_slice(&c.im.to_le_bytes());
            }
        }
    }
    out
}

pub fn decode(mut bytes: &[u8]) -> io::Result<SnapshotFile> {
    let mut header = Vec::new();
    loop {
        let mut line = String::new();
        if bytes.read_line(&mut line)? == 0 {
            return Err(invalid("snapshot header is not terminated by 'end'"));
        }
        let line = line.trim_end_matches('\n').to_string();
        if line == "end" {
            break;
        }
        header.push(line);
    }
    let field = |key: &str| -> io::Result<&str> {
        header
            .iter()
            .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
            .ok_or_else(|| invalid(format!("snapshot header lacks '{key}'")))
    };
    let version: u32 = field(MAGIC)?.parse().map_err(invalid)?;
    if version != FORMAT_VERSION {
        return Err(invalid(format!("unsupported snapshot format version {version}")));
    }
    if field("layout")? != "row-major" || field("element")? != "f64-le" {
        return Err(invalid("snapshot layout must be row-major f64-le"));
    }
    let d: usize = field("d")?.parse().map_err(invalid)?;
    let n: usize = field("n")?.parse().map_err(invalid)?;
    let t: f64 = field("t")?.parse().map_err(invalid)?;
    let step: u64 = field("step")?.parse().map_err(invalid)?;
    let grid = TorusGrid::new(d, n).map_err(invalid)?;

    let mut payload = Vec::new();
    bytes.read_to_end(&mut payload)?;
    let floats = |expected: usize| -> io::Result<Vec<f64>> {
        if payload.len() != expected * 8 {
            return Err(invalid(format!("snapshot payload has {} bytes, expected {}", payload.len(), expected * 8)));
        }
        Ok(payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect())
    };
    let data = match field("space")? {
        "physical" => SnapshotData::Physical(PhysicalField::new(grid, floats(grid.len())?).map_err(invalid)?),
        "spectral" => {
            let v = floats(2 * grid.len())?;
            let coeffs = v.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
            SnapshotData::Spectral(SpectralField::from_coeffs(grid, coeffs).map_err(invalid)?)
        }
        other => return Err(invalid(format!("unknown snapshot space '{other}'"))),
    };
    Ok(SnapshotFile { t, step, data })
}

/// Writes the snapshot and returns the bytes written (for digests).
pub fn write_snapshot(path: &Path, snap: &SnapshotFile) -> io::Result<Vec<u8>> {
    let bytes = encode(snap);
    let mut f = fs::File::create(path)?;
    f.write_all(&bytes)?;
    f.sync_all()?;
    Ok(bytes)
}

pub fn read_snapshot(path: &Path) -> io::Result<SnapshotFile> {
    decode(&fs::read(path)?)
}

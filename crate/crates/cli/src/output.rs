//! Diagnostics CSV, run manifest and digests.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use active_scalar::integrator::DiagnosticsRow;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const CSV_HEADER: &str = "step,t,l2,lq,h_alpha2,mean_mode,energy_residual,noise_energy";

/// 17 significant digits, `.` decimal separator, locale independent.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn diagnostics_csv(rows: &[DiagnosticsRow]) -> String {
    let mut s = String::with_capacity(32 + rows.len() * 190);
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.step,
            num(r.t),
            num(r.l2),
            num(r.lq),
            num(r.h_alpha2),
            num(r.mean_mode),
            num(r.energy_residual),
            num(r.noise_energy)
        );
    }
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Artifact {
    /// Path relative to the run directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Collects the files of one run directory; the single writer for it.
#[derive(Debug)]
pub struct RunWriter {
    root: PathBuf,
    artifacts: Vec<Artifact>,
}

impl RunWriter {
    pub fn create(root: &Path) -> io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(RunWriter { root: root.to_path_buf(), artifacts: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> io::Result<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
        self.artifacts.push(Artifact { path: rel.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 });
        Ok(path)
    }

    pub fn artifacts(&self) -> &[Artifact] {
        &self.artifacts
    }

    /// Writes `manifest.json` listing every artifact written so far.
    pub fn finish(self, manifest: Manifest) -> io::Result<RunSummary> {
        let manifest = Manifest { artifacts: self.artifacts.clone(), ..manifest };
        let json = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
        fs::write(self.root.join("manifest.json"), json.as_bytes())?;
        Ok(RunSummary { root: self.root, artifacts: self.artifacts })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSummary {
    pub root: PathBuf,
    pub artifacts: Vec<Artifact>,
}

impl RunSummary {
    pub fn digest_of(&self, rel: &str) -> Option<&str> {
        self.artifacts.iter().find(|a| a.path == rel).map(|a| a.sha256.as_str())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub master_seed: u64,
    /// Stream ids used, `1..=m`.
    pub streams: Vec<u64>,
    /// The parsed configuration, re-serialized as TOML.
    pub config: String,
    pub artifacts: Vec<Artifact>,
}

impl Manifest {
    pub fn new(command: &str, master_seed: u64, m: usize, config: String) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            master_seed,
            streams: (1..=m as u64).collect(),
            config,
            artifacts: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_fixed_columns_and_17_digits() {
        let row = DiagnosticsRow {
            step: 2,
            t: 0.1 + 0.2,
            l2: 1.0,
            lq: 0.5,
            h_alpha2: 2.0,
            mean_mode: -0.0,
            energy_residual: 1e-300,
            noise_energy: 0.0,
        };
        let csv = diagnostics_csv(&[row]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 8);
        assert_eq!(fields[1], "3.0000000000000004e-1");
        assert_eq!(fields[1].parse::<f64>().unwrap(), 0.1 + 0.2);
    }

    #[test]
    fn sha256_matches_known_vector() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use active_scalar_cli::config::{parse_config, Space};
use active_scalar_cli::output::sha256_hex;
use active_scalar_cli::snapshot::{read_snapshot, write_snapshot, SnapshotData, SnapshotFile};
use active_scalar::spectral::{SpectralField, TorusGrid, Wavenumber};
use serde_json::Value;

const BASE: &str = r#"
[grid]
d = 2
n = 16

[equation]
law = "sqg"
nu = 0.2
alpha = 1.5

[noise]
covariance = "power_law"
a = 0.05
r = 1.0
kmax = 3
diffusion = "additive"

[time]
dt = 0.01
t_end = 0.05

[init]
kind = "modes"
modes = [{ k = [1, 0], cos = 1.0, sin = 0.0 }, { k = [0, 1], cos = 0.0, sin = 0.5 }]

[ensemble]
m = 2
master_seed = 17

[output]
snapshot_stride = 5
"#;

fn bin(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_active-scalar"))
        .args(args)
        .env("ACTIVE_SCALAR_OUTPUT_DIR", out_dir)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap()
}

fn violations(text: &str) -> Vec<String> {
    parse_config(text).unwrap_err().violations
}

#[test]
fn base_config_parses() {
    let cfg = parse_config(BASE).unwrap();
    assert_eq!(cfg.m, 2);
    assert_eq!(cfg.master_seed, 17);
    assert_eq!(cfg.solver.grid.n(), 16);
    assert_eq!(cfg.output.snapshot_space, Space::Spectral);
}

#[test]
fn every_violation_is_reported() {
    let text = BASE.replace("kmax = 3", "kmax = 16") + "\n[stopping]\nthresholds = [2.0, 1.0]\n\n[extra]\nkey = 1\n";
    let v = violations(&text);
    assert_eq!(v.len(), 3, "{v:?}");
    assert!(v.iter().any(|m| m.contains("kmax ≤ n/2")));
    assert!(v.iter().any(|m| m.contains("thresholds")));
    assert!(v.iter().any(|m| m.contains("'extra'")));

    let v = violations(&BASE.replace("nu = 0.2", "nu = 0.2\nviscosity = 1.0"));
    assert!(v.iter().any(|m| m.contains("equation.viscosity")), "{v:?}");
    let v = violations(&BASE.replace("alpha = 1.5", "alpha = 2.5"));
    assert!(!v.is_empty());
}

#[test]
fn snapshot_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = TorusGrid::new(2, 8).unwrap();
    let field = SpectralField::from_modes(g, &[(Wavenumber::new(&[2, -1]), 0.25, -3.5)]).unwrap();
    let snap = SnapshotFile { t: 0.125, step: 12, data: SnapshotData::Spectral(field.clone()) };
    let path = dir.path().join("s.bin");
    let bytes = write_snapshot(&path, &snap).unwrap();
    assert_eq!(bytes, fs::read(&path).unwrap());
    let back = read_snapshot(&path).unwrap();
    assert_eq!(back, snap);
    assert_eq!(back.to_spectral().unwrap(), field);

    fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
    assert!(read_snapshot(&path).is_err());
}

#[test]
fn simulate_writes_a_verifiable_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(&config, BASE).unwrap();
    let out = dir.path().join("out");
    let res = bin(&["simulate", "--config", config.to_str().unwrap()], &out);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    for traj in ["0001", "0002"] {
        let csv = fs::read_to_string(out.join(format!("trajectories/{traj}/diagnostics.csv"))).unwrap();
        assert!(csv.starts_with("step,t,l2,"));
        assert_eq!(csv.lines().count(), 1 + 6);
        assert!(out.join(format!("trajectories/{traj}/snapshots/step_00000005.bin")).exists());
    }
    let ensemble: Value = serde_json::from_slice(&fs::read(out.join("ensemble.json")).unwrap()).unwrap();
    assert_eq!(ensemble["report"]["m"], 2);

    let manifest: Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 17);
    let artifacts = manifest["artifacts"].as_array().unwrap();
    assert!(!artifacts.is_empty());
    for a in artifacts {
        let bytes = fs::read(out.join(a["path"].as_str().unwrap())).unwrap();
        assert_eq!(a["sha256"].as_str().unwrap(), sha256_hex(&bytes));
    }

    // `--set` overrides and invalid configs exit with status 2.
    let res = bin(&["simulate", "--config", config.to_str().unwrap(), "--set", "noise.kmax=12"], &out);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("kmax"));
}

#[test]
fn sweep_writes_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(&config, BASE).unwrap();
    let out = dir.path().join("sweep");
    let res = bin(
        &["sweep", "--config", config.to_str().unwrap(), "--param", "equation.nu", "--values", "0.1,0.4", "--out", out.to_str().unwrap()],
        &out,
    );
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("equation.nu,m,"));
    assert!(lines[1].starts_with("0.1,2,") && lines[2].starts_with("0.4,2,"));
}

#[test]
fn regime_reports_the_granting_clause() {
    let dir = tempfile::tempdir().unwrap();
    let res = bin(&["regime", "--d", "2", "--alpha", "1.5", "--q", "5", "--q0", "inf"], dir.path());
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    assert!(text.contains("global_mild: granted") && text.contains("clause (2)"), "{text}");

    let res = bin(&["regime", "--d", "2", "--alpha", "0.5", "--q", "2", "--q0", "2", "--json"], dir.path());
    let json: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(json["verdicts"]["global_mild"]["granted"], false);
    assert_eq!(json["verdicts"]["martingale"]["granted"], true);
}

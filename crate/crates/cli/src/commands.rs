use std::fmt::Write as _;
use std::path::Path;

use active_scalar::analysis::{moment_estimate, regime_classify, MomentReport, RegimeCertificate, RegimeQuery};
use active_scalar::integrator::{
    run_ensemble_map, DiagnosticsRow, EnsembleReport, InitialData, Snapshot, TrajectorySummary,
};
use active_scalar::spectral::{to_physical, SpectralField};
use anyhow::{bail, Context, Result};
use serde::Serialize;
use toml::Table;

use crate::config::{from_table, set_key, ExperimentConfig, InitSpec, Space};
use crate::output::{diagnostics_csv, Manifest, RunSummary, RunWriter};
use crate::snapshot::{read_snapshot, write_snapshot, SnapshotData, SnapshotFile};

pub fn resolve_init(cfg: &ExperimentConfig) -> Result<InitialData> {
    Ok(match &cfg.init {
        InitSpec::Modes(modes) => InitialData::Fixed(SpectralField::from_modes(cfg.solver.grid, modes)?),
        InitSpec::FilteredRandom(r) => InitialData::Random(r.clone()),
        InitSpec::File(path) => {
            let snap = read_snapshot(path).with_context(|| format!("reading initial data {}", path.display()))?;
            if snap.grid() != &cfg.solver.grid {
                bail!(
                    "initial data {} is on a d = {}, n = {} grid, the run uses d = {}, n = {}",
                    path.display(),
                    snap.grid().dim(),
                    snap.grid().n(),
                    cfg.solver.grid.dim(),
                    cfg.solver.grid.n()
                );
            }
            InitialData::Fixed(snap.to_spectral()?)
        }
    })
}

fn snapshot_file(s: &Snapshot, space: Space) -> Result<SnapshotFile> {
    let data = match space {
        Space::Spectral => SnapshotData::Spectral(s.theta.clone()),
        Space::Physical => SnapshotData::Physical(to_physical(&s.theta)?),
    };
    Ok(SnapshotFile { t: s.t, step: s.step, data })
}

#[derive(Debug, Serialize)]
struct EnsembleOutput<'a> {
    report: &'a EnsembleReport,
    moments: Option<&'a MomentReport>,
    /// Moment estimates are Monte Carlo consistency checks, not bounds.
    label: &'static str,
}

#[derive(Debug)]
pub struct SimulateOutcome {
    pub run: RunSummary,
    pub report: EnsembleReport,
    pub moments: Option<MomentReport>,
}

/// Runs the configured ensemble and writes diagnostics, snapshots,
/// `ensemble.json` and `manifest.json` under the output directory.
///
/// With `m = 1` files sit at the top level; otherwise each trajectory gets
/// `trajectories/NNNN/`. Rows are buffered per trajectory and written in
/// stream order.
pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<SimulateOutcome> {
    let init = resolve_init(cfg)?;
    let solver = &cfg.solver;
    let per_traj = run_ensemble_map(init, solver, cfg.m, cfg.master_seed, |stream, traj| {
        Ok((TrajectorySummary::from_trajectory(stream, traj), traj.rows.clone(), traj.snapshots.clone()))
    })?;

    let mut writer = RunWriter::create(&cfg.output.directory)
        .with_context(|| format!("creating output directory {}", cfg.output.directory.display()))?;
    let mut summaries = Vec::with_capacity(per_traj.len());
    for (summary, rows, snaps) in per_traj {
        let prefix = if cfg.m == 1 { String::new() } else { format!("trajectories/{:04}/", summary.stream) };
        write_rows(&mut writer, &format!("{prefix}diagnostics.csv"), &rows)?;
        for s in &snaps {
            let file = snapshot_file(s, cfg.output.snapshot_space)?;
            writer.write(&format!("{prefix}snapshots/step_{:08}.bin", s.step), &crate::snapshot::encode(&file))?;
        }
        summaries.push(summary);
    }
    let report = EnsembleReport::from_summaries(solver, cfg.master_seed, summaries);
    let moments = match &cfg.regime {
        Some(qr) if qr.q == solver.monitor.q => Some(moment_estimate(&report, qr, None)?),
        _ => None,
    };
    let json = serde_json::to_string_pretty(&EnsembleOutput {
        report: &report,
        moments: moments.as_ref(),
        label: "empirical consistency check",
    })?;
    writer.write("ensemble.json", json.as_bytes())?;
    let manifest = Manifest::new("simulate", cfg.master_seed, cfg.m, toml::to_string(&cfg.source)?);
    let run = writer.finish(manifest)?;
    Ok(SimulateOutcome { run, report, moments })
}

fn write_rows(writer: &mut RunWriter, rel: &str, rows: &[DiagnosticsRow]) -> Result<()> {
    writer.write(rel, diagnostics_csv(rows).as_bytes())?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub value: String,
    pub m: usize,
    pub blowup_fraction: f64,
    pub e_sup_lq: Option<f64>,
    pub e_int_h_beta: Option<f64>,
    pub mean_final_l2_sq: Option<f64>,
}

/// Repeats the ensemble for each value of a dotted config key and writes
/// `sweep.csv` with one summary row per point.
pub fn cmd_sweep(base: &Table, parameter: &str, values: &[String], out_dir: &Path) -> Result<(RunSummary, Vec<SweepPoint>)> {
    let mut points = Vec::with_capacity(values.len());
    let mut seed = 0;
    for v in values {
        let mut table = base.clone();
        set_key(&mut table, parameter, v)?;
        let cfg = from_table(table).with_context(|| format!("sweep point {parameter} = {v}"))?;
        seed = cfg.master_seed;
        let init = resolve_init(&cfg)?;
        let summaries = run_ensemble_map(init, &cfg.solver, cfg.m, cfg.master_seed, |stream, traj| {
            Ok(TrajectorySummary::from_trajectory(stream, traj))
        })?;
        let report = EnsembleReport::from_summaries(&cfg.solver, cfg.master_seed, summaries);
        points.push(SweepPoint {
            value: v.clone(),
            m: report.m,
            blowup_fraction: report.blowup_fraction,
            e_sup_lq: report.mean_of(|s| s.sup_lq),
            e_int_h_beta: report.mean_of(|s| s.int_h_beta_sq),
            mean_final_l2_sq: report.mean_of(|s| s.final_l2_sq),
        });
    }
    let opt = |x: Option<f64>| x.map_or_else(|| "nan".to_string(), |v| format!("{v:.16e}"));
    let mut csv = format!("{parameter},m,blowup_fraction,e_sup_lq,e_int_h_beta,mean_final_l2_sq\n");
    for p in &points {
        let _ = writeln!(
            csv,
            "{},{},{:.16e},{},{},{}",
            p.value,
            p.m,
            p.blowup_fraction,
            opt(p.e_sup_lq),
            opt(p.e_int_h_beta),
            opt(p.mean_final_l2_sq)
        );
    }
    let mut writer = RunWriter::create(out_dir)?;
    writer.write("sweep.csv", csv.as_bytes())?;
    let m = points.first().map_or(0, |p| p.m);
    let mut manifest = Manifest::new("sweep", seed, m, toml::to_string(base)?);
    manifest.command = format!("sweep {parameter} over [{}]", values.join(", "));
    Ok((writer.finish(manifest)?, points))
}

pub fn cmd_regime(qr: &RegimeQuery, json: bool) -> Result<(RegimeCertificate, String)> {
    let cert = regime_classify(qr);
    let text = if json { serde_json::to_string_pretty(&cert)? + "\n" } else { cert.to_string() };
    Ok((cert, text))
}

/// Writes a single snapshot outside a run (e.g. to seed `init.kind = "file"`).
pub fn export_snapshot(path: &Path, field: &SpectralField, space: Space) -> Result<()> {
    let s = Snapshot { step: 0, t: 0.0, theta: field.clone() };
    write_snapshot(path, &snapshot_file(&s, space)?)?;
    Ok(())
}

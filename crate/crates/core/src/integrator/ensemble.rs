use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::init::FilteredRandom;
use crate::noise::RngStream;
use crate::spectral::SpectralField;

use super::config::SolverConfig;
use super::stepper::StopRecord;
use super::trajectory::{run_trajectory, Trajectory};

/// Initial condition of an ensemble member. Random data are drawn from the
/// member's own stream before any noise increment.
#[derive(Clone, Debug)]
pub enum InitialData {
    Fixed(SpectralField),
    Random(FilteredRandom),
}

impl From<SpectralField> for InitialData {
    fn from(f: SpectralField) -> Self {
        InitialData::Fixed(f)
    }
}

impl InitialData {
    pub fn realize(&self, cfg: &SolverConfig, rng: &mut RngStream) -> Result<SpectralField> {
        match self {
            InitialData::Fixed(f) => Ok(f.clone()),
            InitialData::Random(r) => r.sample(&cfg.grid, rng),
        }
    }
}

/// Per-member functionals kept by the ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub stream: u64,
    pub sup_lq: f64,
    pub int_h_beta_sq: f64,
    pub final_l2_sq: f64,
    pub final_t: f64,
    pub blew_up: bool,
    pub stopped_at_t: Option<f64>,
}

impl TrajectorySummary {
    pub fn from_trajectory(stream: u64, traj: &Trajectory) -> Self {
        let blew_up = matches!(traj.stopped_at, Some(StopRecord { reason: super::StopReason::BlowUp, .. }));
        TrajectorySummary {
            stream,
            sup_lq: traj.sup_lq,
            int_h_beta_sq: traj.int_h_beta_sq,
            final_l2_sq: traj.final_state.theta.l2_norm_sq(),
            final_t: traj.final_state.t,
            blew_up,
            stopped_at_t: traj.stopped_at.map(|s| s.t),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub m: usize,
    pub master_seed: u64,
    pub q: f64,
    pub beta: f64,
    pub t_end: f64,
    pub n: usize,
    /// Ordered by stream id `1..=m`.
    pub summaries: Vec<TrajectorySummary>,
    pub blowup_fraction: f64,
}

impl EnsembleReport {
    /// Assembles a report from per-stream summaries given in stream order.
    pub fn from_summaries(cfg: &SolverConfig, master_seed: u64, summaries: Vec<TrajectorySummary>) -> Self {
        let m = summaries.len();
        let blown = summaries.iter().filter(|s| s.blew_up).count();
        EnsembleReport {
            m,
            master_seed,
            q: cfg.monitor.q,
            beta: cfg.monitor.beta,
            t_end: cfg.t_end,
            n: cfg.grid.n(),
            blowup_fraction: if m == 0 { 0.0 } else { blown as f64 / m as f64 },
            summaries,
        }
    }

    /// Members that reached `t_end` without blowing up.
    pub fn survivors(&self) -> impl Iterator<Item = &TrajectorySummary> {
        self.summaries.iter().filter(|s| !s.blew_up)
    }

    /// Mean of a functional over survivors, summed in stream order.
    pub fn mean_of(&self, f: impl Fn(&TrajectorySummary) -> f64) -> Option<f64> {
        let (sum, count) = self.survivors().fold((0.0, 0usize), |(s, c), t| (s + f(t), c + 1));
        (count > 0).then(|| sum / count as f64)
    }
}

/// Runs `m` independent trajectories on streams `(master_seed, 1..=m)` in
/// parallel. The report does not depend on scheduling.
pub fn run_ensemble(init: impl Into<InitialData>, cfg: &SolverConfig, m: usize, master_seed: u64) -> Result<EnsembleReport> {
    let summaries = run_ensemble_map(init, cfg, m, master_seed, |stream, traj| Ok(TrajectorySummary::from_trajectory(stream, traj)))?;
    Ok(EnsembleReport::from_summaries(cfg, master_seed, summaries))
}

/// Like [`run_ensemble`] but maps each finished trajectory through `f`;
/// results come back in stream order.
pub fn run_ensemble_map<T, F>(
    init: impl Into<InitialData>,
    cfg: &SolverConfig,
    m: usize,
    master_seed: u64,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &Trajectory) -> Result<T> + Sync,
{
    if m == 0 {
        return param("ensemble size m must be at least 1");
    }
    cfg.validate()?;
    let init = init.into();
    (1..=m as u64)
        .into_par_iter()
        .map(|stream| {
            let mut rng = RngStream::new(master_seed, stream);
            let theta0 = init.realize(cfg, &mut rng)?;
            let traj = run_trajectory(&theta0, cfg, rng)?;
            f(stream, &traj)
        })
        .collect()
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::RngStream;
use crate::spectral::{abs_pow, homogeneous_norm, sobolev_norm, SpectralField, Wavenumber};

use super::config::{SolverConfig, StoppingLadder};
use super::stepper::{StopReason, StopRecord, Stepper, TrajectoryState};

/// One diagnostics row; column order is the CSV order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub step: u64,
    pub t: f64,
    pub l2: f64,
    pub lq: f64,
    pub h_alpha2: f64,
    pub mean_mode: f64,
    /// Accumulated `Σ ½(|θ_{n+1}|² − |θ_n|²) + dt ν |θ_n|²_{Ḣ^{α/2}}` minus
    /// the injected noise energy.
    pub energy_residual: f64,
    /// Accumulated `Σ ½ |E G(θ_n) ΔW_n|²_{L²}`.
    pub noise_energy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub step: u64,
    pub t: f64,
    pub theta: SpectralField,
}

/// Monitored ladder norm at every step plus first hitting times per rung.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderRecord {
    pub ladder: StoppingLadder,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub hits: Vec<Option<f64>>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub rows: Vec<DiagnosticsRow>,
    pub snapshots: Vec<Snapshot>,
    /// Per-step noise terms `G(θ_n)ΔW_n`, recorded with a snapshot stride of 1.
    pub noise_terms: Vec<SpectralField>,
    pub ladder: Option<LadderRecord>,
    /// `sup_t |θ|^q_{L^q}` (`sup_t |θ|_∞` when `q = ∞`).
    pub sup_lq: f64,
    /// `∫ |θ|²_{H^{β,q}} dt` by the trapezoidal rule.
    pub int_h_beta_sq: f64,
    pub stopped_at: Option<StopRecord>,
    pub final_state: TrajectoryState,
}

fn lq_functional(theta: &SpectralField, q: f64) -> Result<(f64, f64)> {
    let norm = sobolev_norm(theta, 0.0, q)?;
    let pow = if q.is_infinite() { norm } else { norm.powf(q) };
    Ok((norm, pow))
}

/// Runs from `θ₀` at `t = 0` to `t_end`, or until blow-up or the top rung
/// of the stopping ladder.
pub fn run_trajectory(theta0: &SpectralField, cfg: &SolverConfig, rng: RngStream) -> Result<Trajectory> {
    if !theta0.is_finite() {
        return Err(Error::NonFinite("initial condition"));
    }
    run_from_state(TrajectoryState::new(theta0.clone(), rng), cfg)
}

/// Continues `state` to `cfg.steps()`. A state carrying a stop record is
/// resumed, so a run stopped at `τ_n` can be continued with a relaxed
/// ladder and reproduces the unstopped path.
pub fn run_from_state(mut state: TrajectoryState, cfg: &SolverConfig) -> Result<Trajectory> {
    let stepper = Stepper::new(cfg)?;
    if state.theta.grid() != &cfg.grid {
        return Err(Error::GridMismatch);
    }
    state.stopped_at = None;
    let total = cfg.steps();
    let mon = &cfg.monitor;
    let q = mon.q;

    let mut rows = Vec::new();
    let mut snapshots = Vec::new();
    let mut noise_terms = Vec::new();
    let mut ladder = cfg.stopping.clone().map(|l| LadderRecord {
        hits: vec![None; l.thresholds.len()],
        ladder: l,
        times: Vec::new(),
        values: Vec::new(),
    });

    let h_dot = |th: &SpectralField| homogeneous_norm(th, cfg.alpha / 2.0).powi(2);
    let row = |st: &TrajectoryState, lq: f64, energy_residual: f64, noise_energy: f64| -> Result<DiagnosticsRow> {
        Ok(DiagnosticsRow {
            step: st.step,
            t: st.t,
            l2: st.theta.l2_norm(),
            lq,
            h_alpha2: sobolev_norm(&st.theta, cfg.alpha / 2.0, 2.0)?,
            mean_mode: st.theta.mean(),
            energy_residual,
            noise_energy,
        })
    };

    let (mut lq, lq_pow) = lq_functional(&state.theta, q)?;
    let mut sup_lq = lq_pow;
    let mut h_beta_sq = sobolev_norm(&state.theta, mon.beta, q)?.powi(2);
    let mut int_h_beta_sq = 0.0;
    let mut budget = 0.0;
    let mut noise_energy = 0.0;

    let check_ladder = |rec: &mut Option<LadderRecord>, st: &TrajectoryState| -> Result<bool> {
        let Some(rec) = rec else { return Ok(false) };
        let v = sobolev_norm(&st.theta, rec.ladder.s, rec.ladder.q)?;
        rec.times.push(st.t);
        rec.values.push(v);
        for (hit, r) in rec.hits.iter_mut().zip(&rec.ladder.thresholds) {
            if hit.is_none() && v > *r {
                *hit = Some(st.t);
            }
        }
        Ok(v > rec.ladder.top())
    };

    let record_start = state.step;
    rows.push(row(&state, lq, 0.0, 0.0)?);
    if mon.snapshot_stride > 0 {
        snapshots.push(Snapshot { step: state.step, t: state.t, theta: state.theta.clone() });
    }
    if check_ladder(&mut ladder, &state)? {
        state.stopped_at = Some(StopRecord { step: state.step, t: state.t, reason: StopReason::LadderExhausted });
    }

    while state.stopped_at.is_none() && state.step < total {
        let l2_before = state.theta.l2_norm_sq();
        let dissipation = cfg.dt * cfg.nu * h_dot(&state.theta);
        let noise = match stepper.advance(&mut state) {
            Ok(noise) => noise,
            Err(Error::BlowUp { .. }) => {
                state.stopped_at = Some(StopRecord { step: state.step, t: state.t, reason: StopReason::BlowUp });
                break;
            }
            Err(e) => return Err(e),
        };
        let injected = noise.as_ref().map_or(0.0, |n| {
            0.5 * n.coeffs().iter().zip(stepper.decay()).map(|(c, e)| e * e * c.norm_sqr()).sum::<f64>()
        });
        noise_energy += injected;
        budget += 0.5 * (state.theta.l2_norm_sq() - l2_before) + dissipation;

        let (new_lq, new_pow) = lq_functional(&state.theta, q)?;
        lq = new_lq;
        sup_lq = sup_lq.max(new_pow);
        let hb = sobolev_norm(&state.theta, mon.beta, q)?.powi(2);
        int_h_beta_sq += 0.5 * cfg.dt * (h_beta_sq + hb);
        h_beta_sq = hb;

        if mon.snapshot_stride == 1 {
            if let Some(n) = noise {
                noise_terms.push(n);
            }
        }
        if mon.snapshot_stride > 0 && (state.step - record_start) % mon.snapshot_stride as u64 == 0 {
            snapshots.push(Snapshot { step: state.step, t: state.t, theta: state.theta.clone() });
        }
        let exhausted = check_ladder(&mut ladder, &state)?;
        if exhausted {
            state.stopped_at = Some(StopRecord { step: state.step, t: state.t, reason: StopReason::LadderExhausted });
        }
        let last = exhausted || state.step == total;
        if last || (state.step - record_start) % mon.record_stride as u64 == 0 {
            rows.push(row(&state, lq, budget - noise_energy, noise_energy)?);
        }
    }
    if matches!(state.stopped_at, Some(StopRecord { reason: StopReason::BlowUp, .. })) {
        if rows.last().map(|r| r.step) != Some(state.step) {
            rows.push(row(&state, lq, budget - noise_energy, noise_energy)?);
        }
    }

    Ok(Trajectory {
        rows,
        snapshots,
        noise_terms,
        ladder,
        sup_lq,
        int_h_beta_sq,
        stopped_at: state.stopped_at,
        final_state: state,
    })
}

/// First time the monitored norm exceeds each rung; `None` if never.
pub fn hitting_times(traj: &Trajectory, ladder: &StoppingLadder) -> Result<Vec<(f64, Option<f64>)>> {
    ladder.validate()?;
    let Some(rec) = &traj.ladder else {
        return Err(Error::InsufficientData("trajectory did not monitor a ladder norm".into()));
    };
    if !rec.ladder.same_norm(ladder) {
        return Err(Error::InsufficientData(format!(
            "trajectory monitored H^{{{},{}}}, ladder asks for H^{{{},{}}}",
            rec.ladder.s, rec.ladder.q, ladder.s, ladder.q
        )));
    }
    Ok(ladder
        .thresholds
        .iter()
        .map(|&r| {
            let hit = rec.times.iter().zip(&rec.values).find(|(_, v)| **v > r).map(|(t, _)| *t);
            (r, hit)
        })
        .collect())
}

/// Exact variance of each real basis coefficient of the additive stochastic
/// convolution `∫₀ᵗ e^{−νA_α(t−s)} dW(s)` at mode `k`.
pub fn stochastic_convolution_variance(cfg: &SolverConfig, k: Wavenumber, t: f64) -> Result<f64> {
    if !cfg.diff.is_additive() {
        return Err(Error::Unsupported("closed-form convolution variance needs additive diffusion".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::Parameter(format!("time t = {t} must be non-negative")));
    }
    let driven = cfg.cov.driven_modes(&cfg.grid)?;
    let canonical = if k.is_zero() || k.is_positive() { k } else { -k };
    if !driven.contains(&canonical) {
        return Ok(0.0);
    }
    let qk = cfg.cov.eigenvalue(k);
    if k.is_zero() {
        return Ok(qk * t);
    }
    let lambda = cfg.nu * abs_pow(k, cfg.alpha);
    if t.is_infinite() {
        return Ok(qk / (2.0 * lambda));
    }
    Ok(qk * -(-2.0 * lambda * t).exp_m1() / (2.0 * lambda))
}

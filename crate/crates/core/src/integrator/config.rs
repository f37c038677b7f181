use serde::{Deserialize, Serialize};

use crate::constitutive::VelocityLaw;
use crate::error::{param, Error, Result};
use crate::noise::{CovarianceSpec, DiffusionSpec};
use crate::spectral::{check_alpha, TorusGrid};

/// Increasing thresholds on a monitored `H^{s,q}` norm whose first hitting
/// times form the stopping sequence `τ_1 ≤ τ_2 ≤ …`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoppingLadder {
    pub s: f64,
    pub q: f64,
    pub thresholds: Vec<f64>,
}

impl StoppingLadder {
    pub fn new(s: f64, q: f64, thresholds: Vec<f64>) -> Result<Self> {
        let ladder = StoppingLadder { s, q, thresholds };
        ladder.validate()?;
        Ok(ladder)
    }

    pub fn validate(&self) -> Result<()> {
        if self.thresholds.is_empty() {
            return param("stopping ladder needs at least one threshold");
        }
        if self.thresholds.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return param("stopping thresholds must be positive and finite");
        }
        if self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return param("stopping ladder thresholds must be strictly increasing");
        }
        if !(self.q >= 2.0) || !self.s.is_finite() {
            return param("stopping ladder norm needs finite s and q ≥ 2");
        }
        Ok(())
    }

    pub fn same_norm(&self, other: &StoppingLadder) -> bool {
        self.s == other.s && self.q == other.q
    }

    pub fn top(&self) -> f64 {
        *self.thresholds.last().expect("validated ladder is nonempty")
    }
}

/// What a run records besides the state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monitor {
    /// Integrability index of the `L^q` diagnostics (`∞` allowed).
    pub q: f64,
    /// Smoothness of the integrated `∫ |θ|²_{H^{β,q}} dt` functional.
    pub beta: f64,
    /// Diagnostics row cadence in steps.
    pub record_stride: usize,
    /// Snapshot cadence in steps; 0 disables snapshots. A stride of 1 also
    /// records the per-step noise terms.
    pub snapshot_stride: usize,
}

impl Default for Monitor {
    fn default() -> Self {
        Monitor { q: 2.0, beta: 0.0, record_stride: 1, snapshot_stride: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub grid: TorusGrid,
    pub nu: f64,
    pub alpha: f64,
    pub law: VelocityLaw,
    pub cov: CovarianceSpec,
    pub diff: DiffusionSpec,
    pub dt: f64,
    pub t_end: f64,
    pub stopping: Option<StoppingLadder>,
    /// Suppresses the stochastic term.
    pub deterministic: bool,
    /// Enables the transport drift `B(θ)`.
    pub drift: bool,
    pub monitor: Monitor,
}

impl SolverConfig {
    /// Deterministic configuration with the transport drift on and
    /// `H^{α/2,2}` monitoring.
    pub fn new(grid: TorusGrid, law: VelocityLaw, nu: f64, alpha: f64, dt: f64, t_end: f64) -> Self {
        SolverConfig {
            grid,
            nu,
            alpha,
            law,
            cov: CovarianceSpec::identity(1),
            diff: DiffusionSpec::Additive,
            dt,
            t_end,
            stopping: None,
            deterministic: true,
            drift: true,
            monitor: Monitor { beta: alpha / 2.0, ..Monitor::default() },
        }
    }

    pub fn with_noise(mut self, cov: CovarianceSpec, diff: DiffusionSpec) -> Self {
        self.cov = cov;
        self.diff = diff;
        self.deterministic = false;
        self
    }

    pub fn without_drift(mut self) -> Self {
        self.drift = false;
        self
    }

    pub fn with_ladder(mut self, ladder: StoppingLadder) -> Self {
        self.stopping = Some(ladder);
        self
    }

    pub fn with_monitor(mut self, monitor: Monitor) -> Self {
        self.monitor = monitor;
        self
    }

    /// Number of steps to reach `t_end`.
    pub fn steps(&self) -> u64 {
        (self.t_end / self.dt).round() as u64
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return param(format!("viscosity ν = {} must be positive", self.nu));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return param(format!("time step dt = {} must be positive", self.dt));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return param(format!("horizon t_end = {} must be positive", self.t_end));
        }
        let steps = self.t_end / self.dt;
        if steps > (1u64 << 52) as f64 {
            return param("t_end / dt exceeds the exactly representable step range");
        }
        if self.steps() == 0 {
            return param("t_end is shorter than one step");
        }
        if self.law.dim() != self.grid.dim() {
            return Err(Error::DimensionMismatch { expected: self.grid.dim(), found: self.law.dim() });
        }
        self.cov.check(&self.grid)?;
        if let Some(ladder) = &self.stopping {
            ladder.validate()?;
        }
        if !(self.monitor.q >= 2.0) || !self.monitor.beta.is_finite() {
            return param("monitor needs q ≥ 2 and finite β");
        }
        if self.monitor.record_stride == 0 {
            return param("diagnostics stride must be at least 1");
        }
        Ok(())
    }
}

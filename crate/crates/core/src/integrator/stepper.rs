use crate::constitutive::TransportOp;
use crate::error::{Error, Result};
use crate::noise::{diffuse, sample_increment, RngStream};
use crate::spectral::{
    abs_pow, dealias_in_place, to_physical_unchecked, to_spectral_unchecked, SpectralField, TorusGrid,
};

use super::config::SolverConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// Non-finite state or overflow in the drift/diffusion terms.
    BlowUp,
    /// Monitored norm exceeded the top rung of the stopping ladder.
    LadderExhausted,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopRecord {
    pub step: u64,
    pub t: f64,
    pub reason: StopReason,
}

/// Evolving per-path state.
#[derive(Clone, Debug)]
pub struct TrajectoryState {
    pub t: f64,
    pub step: u64,
    pub theta: SpectralField,
    pub rng: RngStream,
    pub stopped_at: Option<StopRecord>,
}

impl TrajectoryState {
    pub fn new(theta: SpectralField, rng: RngStream) -> Self {
        TrajectoryState { t: 0.0, step: 0, theta, rng, stopped_at: None }
    }
}

/// `(1 − e^{−z})/z`, equal to 1 at `z = 0`.
pub(crate) fn phi1(z: f64) -> f64 {
    if z < 1e-8 {
        1.0 - 0.5 * z
    } else {
        -(-z).exp_m1() / z
    }
}

/// Stochastic exponential-Euler stepper with precomputed per-mode weights:
///
/// ```text
/// θ_{n+1} = E θ_n + dt Φ₁ B(θ_n) + E G(θ_n) ΔW_n,   E = e^{−ν|k|^α dt}
/// ```
#[derive(Debug)]
pub struct Stepper<'a> {
    cfg: &'a SolverConfig,
    decay: Vec<f64>,
    drift_weight: Vec<f64>,
    transport: Option<TransportOp>,
}

impl<'a> Stepper<'a> {
    pub fn new(cfg: &'a SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let (decay, drift_weight) = weights(&cfg.grid, cfg.nu, cfg.alpha, cfg.dt);
        let transport = if cfg.drift { Some(TransportOp::new(cfg.grid, &cfg.law)?) } else { None };
        Ok(Stepper { cfg, decay, drift_weight, transport })
    }

    pub fn config(&self) -> &SolverConfig {
        self.cfg
    }

    pub(crate) fn decay(&self) -> &[f64] {
        &self.decay
    }

    /// Advances `state` by one step and returns the dealiased noise term
    /// `G(θ_n)ΔW_n` (before the semigroup), if any. On error the state is
    /// left at `θ_n`.
    pub fn advance(&self, state: &mut TrajectoryState) -> Result<Option<SpectralField>> {
        let cfg = self.cfg;
        if state.theta.grid() != &cfg.grid {
            return Err(Error::GridMismatch);
        }
        let blow_up = Error::BlowUp { step: state.step + 1 };
        let theta = &state.theta;
        let mut next = theta.clone();
        for (c, e) in next.coeffs_mut().iter_mut().zip(&self.decay) {
            *c *= *e;
        }
        if let Some(op) = &self.transport {
            let b = match op.apply(theta) {
                Ok(b) => b,
                Err(Error::Overflow(_)) => return Err(blow_up),
                Err(e) => return Err(e),
            };
            for ((c, b), w) in next.coeffs_mut().iter_mut().zip(b.coeffs()).zip(&self.drift_weight) {
                *c += b * *w;
            }
        }
        let mut noise_term = None;
        if !cfg.deterministic {
            let incr = sample_increment(&cfg.cov, &cfg.grid, cfg.dt, &mut state.rng)?;
            let mut noise = if cfg.diff.is_additive() {
                incr.field
            } else {
                let th = to_physical_unchecked(theta);
                let w = to_physical_unchecked(&incr.field);
                match diffuse(&th, &cfg.diff, &w) {
                    Ok(p) => to_spectral_unchecked(&p),
                    Err(Error::Overflow(_)) => return Err(blow_up),
                    Err(e) => return Err(e),
                }
            };
            dealias_in_place(&mut noise);
            for ((c, n), e) in next.coeffs_mut().iter_mut().zip(noise.coeffs()).zip(&self.decay) {
                *c += n * *e;
            }
            noise_term = Some(noise);
        }
        dealias_in_place(&mut next);
        if !next.is_finite() {
            return Err(blow_up);
        }
        state.theta = next;
        state.step += 1;
        state.t = state.step as f64 * cfg.dt;
        Ok(noise_term)
    }
}

pub(crate) fn weights(grid: &TorusGrid, nu: f64, alpha: f64, dt: f64) -> (Vec<f64>, Vec<f64>) {
    grid.wavenumbers()
        .map(|k| {
            let z = nu * abs_pow(k, alpha) * dt;
            ((-z).exp(), dt * phi1(z))
        })
        .unzip()
}

/// One exponential-Euler step.
pub fn step(state: &TrajectoryState, cfg: &SolverConfig) -> Result<TrajectoryState> {
    if state.stopped_at.is_some() {
        return Err(Error::Parameter("cannot step a stopped trajectory".into()));
    }
    let stepper = Stepper::new(cfg)?;
    let mut next = state.clone();
    stepper.advance(&mut next)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::{Preset, VelocityLaw};
    use crate::spectral::Wavenumber;

    #[test]
    fn phi1_limits() {
        assert_eq!(phi1(0.0), 1.0);
        assert!((phi1(1e-9) - 1.0).abs() < 1e-9);
        assert!((phi1(1.0) - (1.0 - (-1f64).exp())).abs() < 1e-15);
        assert!((phi1(1e-4) - (1.0 - 0.5e-4 + 1e-8 / 6.0 - 1e-12 / 24.0)).abs() < 1e-15);
    }

    #[test]
    fn linear_step_is_exact_per_mode() {
        let grid = TorusGrid::new(2, 16).unwrap();
        let law = VelocityLaw::preset(Preset::Sqg).unwrap();
        let cfg = SolverConfig::new(grid, law, 0.7, 1.3, 0.01, 1.0).without_drift();
        let k = Wavenumber::new(&[2, -1]);
        let theta = SpectralField::from_modes(grid, &[(k, 1.0, 0.5)]).unwrap();
        let s0 = TrajectoryState::new(theta.clone(), RngStream::new(0, 0));
        let s1 = step(&s0, &cfg).unwrap();
        let factor = (-0.7 * 5f64.powf(0.65) * 0.01).exp();
        let expect = theta.scaled(factor);
        assert!(s1.theta.sub(&expect).unwrap().l2_norm() <= 1e-15);
        assert_eq!(s1.step, 1);
        assert!((s1.t - 0.01).abs() < 1e-18);
    }

    #[test]
    fn stopped_state_cannot_step() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let law = VelocityLaw::preset(Preset::Burgers1d).unwrap();
        let cfg = SolverConfig::new(grid, law, 0.1, 2.0, 0.01, 1.0);
        let mut s = TrajectoryState::new(SpectralField::zeros(grid), RngStream::new(0, 0));
        s.stopped_at = Some(StopRecord { step: 0, t: 0.0, reason: StopReason::BlowUp });
        assert!(step(&s, &cfg).is_err());
    }

    #[test]
    fn blow_up_is_signalled_with_step_index() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let law = VelocityLaw::preset(Preset::Burgers1d).unwrap();
        let cfg = SolverConfig::new(grid, law, 0.1, 2.0, 0.5, 1.0);
        let theta = SpectralField::from_modes(grid, &[(Wavenumber::new(&[1]), 0.0, 1e300)]).unwrap();
        let s = TrajectoryState::new(theta, RngStream::new(0, 0));
        assert_eq!(step(&s, &cfg).unwrap_err(), Error::BlowUp { step: 1 });
    }
}

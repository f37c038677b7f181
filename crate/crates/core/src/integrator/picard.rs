use crate::constitutive::TransportOp;
use crate::error::{param, Error, Result};
use crate::spectral::{sobolev_norm, SpectralField};

use super::config::SolverConfig;
use super::stepper::weights;

/// Converged fixed point of the deterministic mild formula on a uniform
/// time grid.
#[derive(Clone, Debug)]
pub struct PicardSolution {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    pub iterations: usize,
    pub last_update: f64,
}

/// Picard iteration
///
/// ```text
/// θ^{(m+1)}(t) = e^{−νA_α t} θ₀ + ∫₀ᵗ e^{−νA_α(t−s)} B(θ^{(m)}(s)) ds
/// ```
///
/// on `[0, t_star]` with node spacing close to `cfg.dt`, trapezoidal
/// quadrature and exact per-mode semigroup factors, started from the linear
/// flow. Stops once `sup_t |θ^{(m+1)} − θ^{(m)}|_{L^q} < tol`, with `q` the
/// monitored index.
pub fn picard_solve(
    theta0: &SpectralField,
    cfg: &SolverConfig,
    t_star: f64,
    tol: f64,
    m_max: usize,
) -> Result<PicardSolution> {
    cfg.validate()?;
    if !cfg.deterministic {
        return Err(Error::Unsupported("picard_solve needs a deterministic configuration".into()));
    }
    if theta0.grid() != &cfg.grid {
        return Err(Error::GridMismatch);
    }
    if !(t_star > 0.0 && t_star <= cfg.t_end * (1.0 + 1e-12)) {
        return param(format!("t_star = {t_star} must lie in (0, t_end]"));
    }
    if !(tol > 0.0) || m_max == 0 {
        return param("picard_solve needs tol > 0 and m_max ≥ 1");
    }
    let intervals = ((t_star / cfg.dt).round() as usize).max(1);
    let h = t_star / intervals as f64;
    let times: Vec<f64> = (0..=intervals).map(|i| i as f64 * h).collect();
    let (decay, _) = weights(&cfg.grid, cfg.nu, cfg.alpha, h);
    let propagate = |f: &SpectralField| {
        let mut out = f.clone();
        for (c, e) in out.coeffs_mut().iter_mut().zip(&decay) {
            *c *= *e;
        }
        out
    };

    let mut linear = Vec::with_capacity(intervals + 1);
    linear.push(theta0.clone());
    for i in 0..intervals {
        let next = propagate(&linear[i]);
        linear.push(next);
    }

    let transport = TransportOp::new(cfg.grid, &cfg.law)?;
    let mut current = linear.clone();
    let mut last_update = f64::INFINITY;
    for iteration in 1..=m_max {
        let drift: Vec<SpectralField> = if cfg.drift {
            match current.iter().map(|th| transport.apply(th)).collect::<Result<Vec<_>>>() {
                Ok(b) => b,
                Err(Error::Overflow(_)) => {
                    return Err(Error::NonContraction { iterations: iteration, last_update: f64::INFINITY })
                }
                Err(e) => return Err(e),
            }
        } else {
            vec![SpectralField::zeros(cfg.grid); intervals + 1]
        };

        let mut next = Vec::with_capacity(intervals + 1);
        next.push(theta0.clone());
        let mut integral = SpectralField::zeros(cfg.grid);
        let mut update: f64 = 0.0;
        for i in 1..=intervals {
            // ∫₀^{t_i} = E(h) ∫₀^{t_{i−1}} + h/2 (E(h) B_{i−1} + B_i)
            let mut acc = propagate(&integral);
            acc.axpy(0.5 * h, &propagate(&drift[i - 1]))?;
            acc.axpy(0.5 * h, &drift[i])?;
            integral = acc;
            let mut state = linear[i].clone();
            state.axpy(1.0, &integral)?;
            update = update.max(sobolev_norm(&state.sub(&current[i])?, 0.0, cfg.monitor.q)?);
            next.push(state);
        }
        if !update.is_finite() {
            return Err(Error::NonContraction { iterations: iteration, last_update: update });
        }
        current = next;
        last_update = update;
        if update < tol {
            return Ok(PicardSolution { times, states: current, iterations: iteration, last_update });
        }
    }
    Err(Error::NonContraction { iterations: m_max, last_update })
}

use crate::constitutive::TransportOp;
use crate::error::{Error, Result};
use crate::integrator::{SolverConfig, Trajectory};
use crate::spectral::{abs_pow, Wavenumber};
use crate::Complex64;

/// Weights `(w_a, w_b)` with `∫_0^h f ≈ w_a f(0) + w_b f(h)`, consistent
/// (`w_a + w_b = h`) and exact for `f = e^{−λs}`. They reduce to the
/// trapezoid as `λh → 0`.
fn fitted_weights(lambda: f64, h: f64) -> (f64, f64) {
    let x = lambda * h;
    // w_a / h = 1/x − 1/(eˣ − 1)
    let wa = if x < 1e-2 {
        0.5 - x / 12.0 + x.powi(3) / 720.0
    } else {
        1.0 / x + (-x).exp() / (-x).exp_m1()
    };
    (h * wa, h * (1.0 - wa))
}

/// Residual of the weak formulation tested against `φ = e^{ik·x}` at every
/// recorded time, per test mode:
///
/// ```text
/// r_k(t) = θ̂_k(t) − θ̂_k(0) + ν|k|^α ∫₀ᵗ θ̂_k − ∫₀ᵗ B̂_k(θ) − Σ_{t_n < t} (G(θ_n)ΔW_n)^_k
/// ```
///
/// The transport pairing is that of the drift `B(θ) = u·∇θ` itself, so for
/// divergence-free laws it equals `−⟨u·∇φ, θ⟩`. The dissipative integral
/// uses exponentially fitted weights (exact on linear flow), the transport
/// integral the trapezoid. Returns `(t, max_k |r_k(t)|)` pairs.
pub fn weak_form_residual_series(
    traj: &Trajectory,
    cfg: &SolverConfig,
    test_modes: &[Wavenumber],
) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    let grid = cfg.grid;
    if test_modes.is_empty() {
        return Err(Error::InsufficientData("no test modes given".into()));
    }
    let mut idx = Vec::with_capacity(test_modes.len());
    for &k in test_modes {
        match grid.index_of(k) {
            Some(i) if grid.in_dealias_band(k) => idx.push((i, cfg.nu * abs_pow(k, cfg.alpha))),
            _ => return Err(Error::Parameter(format!("test mode {k} lies outside the dealiased band"))),
        }
    }
    let snaps = &traj.snapshots;
    if snaps.len() < 2 || snaps.windows(2).any(|w| w[1].step != w[0].step + 1) {
        return Err(Error::InsufficientData("weak-form residual needs a snapshot at every step".into()));
    }
    let steps = snaps.len() - 1;
    if !cfg.deterministic && traj.noise_terms.len() < steps {
        return Err(Error::InsufficientData("weak-form residual needs the per-step noise terms".into()));
    }
    let h = cfg.dt;
    let weights: Vec<(f64, f64)> = idx.iter().map(|&(_, lambda)| fitted_weights(lambda, h)).collect();

    let transport = TransportOp::new(cfg.grid, &cfg.law)?;
    let drift = |n: usize| -> Result<Option<Vec<Complex64>>> {
        if !cfg.drift {
            return Ok(None);
        }
        let b = transport.apply(&snaps[n].theta)?;
        Ok(Some(idx.iter().map(|&(i, _)| b.coeffs()[i]).collect()))
    };

    let start: Vec<Complex64> = idx.iter().map(|&(i, _)| snaps[0].theta.coeffs()[i]).collect();
    let mut diss = vec![Complex64::new(0.0, 0.0); idx.len()];
    let mut transport = diss.clone();
    let mut noise = diss.clone();
    let mut b_prev = drift(0)?;
    let mut out = Vec::with_capacity(steps);
    for n in 0..steps {
        let (th0, th1) = (snaps[n].theta.coeffs(), snaps[n + 1].theta.coeffs());
        let b_next = drift(n + 1)?;
        let mut worst: f64 = 0.0;
        for (m, &(i, lambda)) in idx.iter().enumerate() {
            let (wa, wb) = weights[m];
            diss[m] += (th0[i] * wa + th1[i] * wb) * lambda;
            if let (Some(b0), Some(b1)) = (&b_prev, &b_next) {
                transport[m] += (b0[m] + b1[m]) * (0.5 * h);
            }
            if !cfg.deterministic {
                noise[m] += traj.noise_terms[n].coeffs()[i];
            }
            let r = th1[i] - start[m] + diss[m] - transport[m] - noise[m];
            worst = worst.max(r.norm());
        }
        out.push((snaps[n + 1].t, worst));
        b_prev = b_next;
    }
    Ok(out)
}

/// `sup_t max_k |r_k(t)|` over the recorded window.
pub fn weak_form_residual(traj: &Trajectory, cfg: &SolverConfig, test_modes: &[Wavenumber]) -> Result<f64> {
    Ok(weak_form_residual_series(traj, cfg, test_modes)?.into_iter().fold(0.0, |m, (_, r)| m.max(r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fitted_weights_are_exact_on_exponentials() {
        for &(lambda, h) in &[(0.0, 0.1), (1e-3, 0.01), (2.0, 0.004), (3.0, 0.5), (50.0, 1.0)] {
            let (wa, wb) = fitted_weights(lambda, h);
            assert!((wa + wb - h).abs() < 1e-15 * h.max(1.0));
            let exact = if lambda == 0.0 { h } else { -(-lambda * h as f64).exp_m1() / lambda };
            let quad = wa + wb * (-lambda * h).exp();
            assert!((quad - exact).abs() < 1e-15, "λ={lambda}: {quad} vs {exact}");
        }
    }

    #[test]
    fn series_and_closed_form_meet() {
        let x: f64 = 0.01;
        let closed = 1.0 / x + (-x).exp() / (-x).exp_m1();
        let series = 0.5 - x / 12.0 + x.powi(3) / 720.0;
        assert!((series - closed).abs() < 1e-13);
        assert_eq!(fitted_weights(x * (1.0 - 1e-12), 1.0).0, 0.5 - x * (1.0 - 1e-12) / 12.0 + (x * (1.0 - 1e-12)).powi(3) / 720.0);
    }
}

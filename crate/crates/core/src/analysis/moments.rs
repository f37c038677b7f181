use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::integrator::{EnsembleReport, TrajectorySummary};

use super::regime::{admissible_exponents, RegimeQuery};

/// Relative change allowed under `n → 2n` for the resolution-stability flag.
pub const RESOLUTION_THRESHOLD: f64 = 0.10;

/// Standard errors are only reported from this many survivors on.
const MIN_FOR_INTERVALS: usize = 30;

/// Consistency check comparing two resolutions of the same ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolutionCheck {
    pub n_coarse: usize,
    pub n_fine: usize,
    pub rel_change_sup_lq: f64,
    pub rel_change_int_h_beta: f64,
    pub threshold: f64,
    /// Both functionals change by at most `threshold`.
    pub stable: bool,
}

/// Monte Carlo estimates of `E sup_t |θ|^q_{L^q}` and `E ∫|θ|²_{H^{β,q}} dt`.
/// These are empirical consistency checks, not proofs of any bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub m: usize,
    pub survivors: usize,
    pub q: f64,
    pub beta: f64,
    pub beta_max: f64,
    /// The ensemble monitored `β = β_max`.
    pub beta_is_beta_max: bool,
    pub e_sup_lq: Option<f64>,
    pub e_int_h_beta: Option<f64>,
    /// Standard-error half widths, present from 30 survivors on.
    pub se_sup_lq: Option<f64>,
    pub se_int_h_beta: Option<f64>,
    pub blowup_fraction: f64,
    /// Every trajectory blew up; no estimate exists.
    pub degenerate: bool,
    pub resolution: Option<ResolutionCheck>,
}

fn mean_se(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let se = (values.len() >= MIN_FOR_INTERVALS).then(|| {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    });
    (mean, se)
}

fn rel_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (b - a).abs() / a.abs().max(b.abs())
    }
}

/// Aggregates an ensemble into a [`MomentReport`]. With `refined` (the same
/// ensemble at twice the resolution) the resolution-stability flag is set.
pub fn moment_estimate(
    report: &EnsembleReport,
    qr: &RegimeQuery,
    refined: Option<&EnsembleReport>,
) -> Result<MomentReport> {
    if report.q != qr.q {
        return param(format!("ensemble monitored q = {} but the query has q = {}", report.q, qr.q));
    }
    let beta_max = admissible_exponents(qr).beta_max;
    let survivors: Vec<&TrajectorySummary> = report.survivors().collect();
    let degenerate = survivors.is_empty();
    let (e_sup, se_sup, e_int, se_int) = if degenerate {
        (None, None, None, None)
    } else {
        let sup: Vec<f64> = survivors.iter().map(|s| s.sup_lq).collect();
        let int: Vec<f64> = survivors.iter().map(|s| s.int_h_beta_sq).collect();
        let (a, sa) = mean_se(&sup);
        let (b, sb) = mean_se(&int);
        (Some(a), sa, Some(b), sb)
    };

    let resolution = match refined {
        None => None,
        Some(fine) => {
            if fine.q != report.q || fine.beta != report.beta || fine.m != report.m {
                return param("refined ensemble must share m, q and β with the coarse one");
            }
            match (e_sup, e_int, fine.mean_of(|s| s.sup_lq), fine.mean_of(|s| s.int_h_beta_sq)) {
                (Some(a), Some(b), Some(fa), Some(fb)) => {
                    let rs = rel_change(a, fa);
                    let ri = rel_change(b, fb);
                    Some(ResolutionCheck {
                        n_coarse: report.n,
                        n_fine: fine.n,
                        rel_change_sup_lq: rs,
                        rel_change_int_h_beta: ri,
                        threshold: RESOLUTION_THRESHOLD,
                        stable: rs <= RESOLUTION_THRESHOLD && ri <= RESOLUTION_THRESHOLD,
                    })
                }
                _ => None,
            }
        }
    };

    Ok(MomentReport {
        m: report.m,
        survivors: survivors.len(),
        q: report.q,
        beta: report.beta,
        beta_max,
        beta_is_beta_max: (report.beta - beta_max).abs() <= 1e-12,
        e_sup_lq: e_sup,
        e_int_h_beta: e_int,
        se_sup_lq: se_sup,
        se_int_h_beta: se_int,
        blowup_fraction: report.blowup_fraction,
        degenerate,
        resolution,
    })
}

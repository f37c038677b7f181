use active_scalar::analysis::{
    admissible_exponents, alpha0, moment_estimate, regime_classify, weak_form_residual, weak_form_residual_series,
    Clause, RegimeQuery,
};
use active_scalar::constitutive::{ModeTag, Preset, VelocityLaw};
use active_scalar::init::from_fn;
use active_scalar::integrator::{run_ensemble, run_trajectory, Monitor, SolverConfig};
use active_scalar::noise::{CovarianceSpec, DiffusionSpec, RngStream};
use active_scalar::spectral::{TorusGrid, Wavenumber};
use active_scalar::Error;
use proptest::prelude::*;

#[test]
fn alpha0_values() {
    assert_eq!(alpha0(1).unwrap(), 1.0);
    assert_eq!(alpha0(2).unwrap(), 4.0 / 3.0);
    assert_eq!(alpha0(3).unwrap(), 5.0 / 3.0);
    assert!(alpha0(0).is_err());
}

#[test]
fn worked_examples() {
    let c = regime_classify(&RegimeQuery::new(2, 1.5, ModeTag::Ca, 5.0, f64::INFINITY));
    assert_eq!(c.verdicts.global_mild.clause, Some(Clause::Clause2));
    assert_eq!(c.verdicts.local_mild.clause, Some(Clause::LocalSubcritical));
    assert_eq!(c.verdicts.martingale.clause, Some(Clause::Martingale));

    let c = regime_classify(&RegimeQuery::new(1, 1.2, ModeTag::Ca, 5.0, 6.0));
    assert_eq!(c.verdicts.global_mild.clause, Some(Clause::Clause1));

    let c = regime_classify(&RegimeQuery::new(2, 0.5, ModeTag::Ca, 2.0, 2.0));
    assert!(!c.verdicts.global_mild.granted && !c.verdicts.local_mild.granted);
    assert!(c.verdicts.martingale.granted);
    assert!(c.notes.iter().any(|n| n.contains("α ≤ α₀(2) = 1.333333")));
    assert!(c.notes.iter().any(|n| n.contains("α ≤ 1+d/q = 2")));

    let c = regime_classify(&RegimeQuery::new(2, 1.5, ModeTag::Cc, 8.0, 8.0).with_delta(0.75));
    assert!(c.verdicts.local_mild.granted);
    assert!(!c.verdicts.global_mild.granted && !c.verdicts.martingale.granted);
    assert_eq!(c.exponents.delta_second_min, Some(1.5 + 1.0 + 0.25 - 0.75));
}

#[test]
fn exponent_formulas() {
    let e = admissible_exponents(&RegimeQuery::new(2, 1.5, ModeTag::Ca, 5.0, f64::INFINITY).with_delta(1.0));
    assert!((e.beta_max - 0.15).abs() <= 1e-12);
    assert!((e.delta1_max.unwrap() - 0.1).abs() <= 1e-12);
    assert!((e.delta_prime_min - 2.6).abs() <= 1e-12);
    // α − 1 − d/q < 0: no δ₁ bound.
    assert_eq!(admissible_exponents(&RegimeQuery::new(2, 1.2, ModeTag::Ca, 5.0, 5.0)).delta1_max, None);
}

#[test]
fn smoothness_floor_violation_denies_everything() {
    let c = regime_classify(&RegimeQuery::new(2, 1.5, ModeTag::Cc, 8.0, 8.0).with_delta(0.5));
    assert!(!c.verdicts.local_mild.granted && !c.verdicts.global_mild.granted && !c.verdicts.martingale.granted);
    assert!(c.notes.iter().any(|n| n.contains("δ > 0.5")));
}

fn sqg(n: usize, dt: f64, t_end: f64) -> SolverConfig {
    SolverConfig::new(TorusGrid::new(2, n).unwrap(), VelocityLaw::preset(Preset::Sqg).unwrap(), 0.1, 1.5, dt, t_end)
        .with_monitor(Monitor { q: 2.0, beta: 0.0, record_stride: 1000, snapshot_stride: 1 })
}

fn low_modes() -> Vec<Wavenumber> {
    let mut out = Vec::new();
    for a in -3i64..=3 {
        for b in -3i64..=3 {
            if (a, b) != (0, 0) && a * a + b * b <= 9 {
                out.push(Wavenumber::new(&[a, b]));
            }
        }
    }
    out
}

#[test]
fn weak_residual_vanishes_on_linear_flow() {
    let cfg = sqg(16, 0.01, 0.5).without_drift();
    let th0 = from_fn(cfg.grid, |x| (x[0] + 2.0 * x[1]).cos() + x[1].sin()).unwrap();
    let traj = run_trajectory(&th0, &cfg, RngStream::new(0, 0)).unwrap();
    let series = weak_form_residual_series(&traj, &cfg, &low_modes()).unwrap();
    assert_eq!(series.len() + 1, traj.snapshots.len());
    assert!(series.iter().all(|&(_, r)| r < 1e-14));
}

#[test]
fn weak_residual_is_first_order() {
    let th0 = |g| from_fn(g, |x| x[0].sin() * x[1].sin() + x[1].cos()).unwrap();
    let residual = |dt| {
        let cfg = sqg(32, dt, 0.2);
        let traj = run_trajectory(&th0(cfg.grid), &cfg, RngStream::new(0, 0)).unwrap();
        weak_form_residual(&traj, &cfg, &low_modes()).unwrap()
    };
    let ratio = residual(2e-3) / residual(1e-3);
    assert!((1.6..=2.4).contains(&ratio), "ratio {ratio}");
}

#[test]
fn weak_residual_needs_every_snapshot() {
    let mut cfg = sqg(16, 0.01, 0.1);
    cfg.monitor.snapshot_stride = 2;
    let th0 = from_fn(cfg.grid, |x| x[0].cos()).unwrap();
    let traj = run_trajectory(&th0, &cfg, RngStream::new(0, 0)).unwrap();
    assert!(matches!(weak_form_residual(&traj, &cfg, &low_modes()), Err(Error::InsufficientData(_))));

    cfg.monitor.snapshot_stride = 1;
    let traj = run_trajectory(&th0, &cfg, RngStream::new(0, 0)).unwrap();
    assert!(weak_form_residual(&traj, &cfg, &[Wavenumber::new(&[7, 0])]).is_err());
}

#[test]
fn moment_report_without_noise_has_zero_spread() {
    let cfg = sqg(16, 0.01, 0.2).with_monitor(Monitor { q: 5.0, beta: 0.15, record_stride: 100, snapshot_stride: 0 });
    let th0 = from_fn(cfg.grid, |x| x[0].cos() + x[1].sin()).unwrap();
    let report = run_ensemble(th0.clone(), &cfg, 30, 7).unwrap();
    let qr = RegimeQuery::new(2, 1.5, ModeTag::Ca, 5.0, f64::INFINITY);
    let m = moment_estimate(&report, &qr, None).unwrap();
    let single = run_trajectory(&th0, &cfg, RngStream::new(0, 0)).unwrap();
    // Averaging identical samples may cost an ulp.
    assert!((m.e_sup_lq.unwrap() - single.sup_lq).abs() <= 1e-14 * single.sup_lq);
    assert!(m.se_sup_lq.unwrap() <= 1e-14 * single.sup_lq);
    assert!(m.beta_is_beta_max && !m.degenerate);

    let wrong_q = RegimeQuery::new(2, 1.5, ModeTag::Ca, 4.0, f64::INFINITY);
    assert!(moment_estimate(&report, &wrong_q, None).is_err());
}

#[test]
fn moment_estimates_agree_across_seeds() {
    let cfg = sqg(16, 0.02, 0.5)
        .without_drift()
        .with_noise(CovarianceSpec::power_law(0.5, 1.0, 3).unwrap(), DiffusionSpec::Additive)
        .with_monitor(Monitor { q: 4.0, beta: 0.0, record_stride: 100, snapshot_stride: 0 });
    let th0 = from_fn(cfg.grid, |x| x[0].cos()).unwrap();
    let qr = RegimeQuery::new(2, 1.5, ModeTag::Ca, 4.0, f64::INFINITY);
    let a = moment_estimate(&run_ensemble(th0.clone(), &cfg, 60, 1).unwrap(), &qr, None).unwrap();
    let b = moment_estimate(&run_ensemble(th0, &cfg, 60, 2).unwrap(), &qr, None).unwrap();
    let (ea, eb) = (a.e_sup_lq.unwrap(), b.e_sup_lq.unwrap());
    let se = a.se_sup_lq.unwrap().hypot(b.se_sup_lq.unwrap());
    assert!(ea.is_finite() && (ea - eb).abs() <= 3.0 * se, "{ea} vs {eb} (se {se})");
}

#[test]
fn degenerate_when_everything_blows_up() {
    let g = TorusGrid::new(1, 32).unwrap();
    let cfg = SolverConfig::new(g, VelocityLaw::preset(Preset::Burgers1d).unwrap(), 0.01, 1.0, 0.5, 100.0)
        .with_noise(CovarianceSpec::identity(1), DiffusionSpec::Additive);
    let th0 = from_fn(g, |x| 1e3 * x[0].sin()).unwrap();
    let report = run_ensemble(th0, &cfg, 3, 1).unwrap();
    assert_eq!(report.blowup_fraction, 1.0);
    let m = moment_estimate(&report, &RegimeQuery::new(1, 1.0, ModeTag::Cb, 2.0, 2.0), None).unwrap();
    assert!(m.degenerate && m.e_sup_lq.is_none());
}

fn mode() -> impl Strategy<Value = ModeTag> {
    prop_oneof![Just(ModeTag::Ca), Just(ModeTag::Cb), Just(ModeTag::Cc)]
}

fn query() -> impl Strategy<Value = RegimeQuery> {
    (1usize..=3, 0.05..=2.0f64, mode(), 2.0..12.0f64, prop_oneof![Just(f64::INFINITY), 2.0..16.0f64], 0.0..2.0f64)
        .prop_map(|(d, alpha, mode, q, q0, delta)| RegimeQuery::new(d, alpha, mode, q, q0.max(q)).with_delta(delta))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn certificates_are_total_and_coherent(qr in query()) {
        let c = regime_classify(&qr);
        prop_assert_eq!(&c, &regime_classify(&qr));
        for v in [c.verdicts.global_mild, c.verdicts.local_mild, c.verdicts.martingale] {
            prop_assert_eq!(v.granted, v.clause.is_some());
        }
        if qr.mode != ModeTag::Ca {
            prop_assert!(!c.verdicts.global_mild.granted && !c.verdicts.martingale.granted);
        }
        let e = c.exponents;
        prop_assert_eq!(e.beta_max.is_some(), c.verdicts.global_mild.granted || c.verdicts.martingale.granted);
        prop_assert_eq!(e.beta_nonpositive, e.beta_max.is_some_and(|b| b <= 0.0));
        if let Some(d1) = e.delta1_max {
            prop_assert!(qr.alpha - 1.0 - qr.d as f64 / qr.q >= 0.0);
            prop_assert!(d1 <= qr.delta);
        }
        if e.beta_max.is_none() && e.delta_prime_min.is_none() {
            prop_assert!(!c.verdicts.global_mild.granted);
        }
        // A granted global verdict implies the general local one.
        if c.verdicts.global_mild.granted {
            prop_assert!(qr.alpha > alpha0(qr.d).unwrap());
        }
    }

    #[test]
    fn exponents_follow_their_formulas(qr in query()) {
        let d = qr.d as f64;
        let (a, q) = (qr.alpha, qr.q);
        let qs = q / (q - 1.0);
        let e = admissible_exponents(&qr);
        prop_assert!((e.beta_max - (a / 2.0 - d / 2.0 + d / q)).abs() <= 1e-12);
        prop_assert!((e.delta_prime_min - a.max(1.0 + d / qs)).abs() <= 1e-12);
        prop_assert!((e.eta_min - (1.0 + d / q).max(a / 2.0 - d / 2.0 + d / qs)).abs() <= 1e-12);
        prop_assert!((e.delta_second_min - (a + 1.0 + d / q - qr.delta)).abs() <= 1e-12);
    }

    /// Raising α never takes away a granted verdict.
    #[test]
    fn verdicts_are_monotone_in_alpha(qr in query(), steps in 1usize..20) {
        let mut prev = regime_classify(&qr).verdicts;
        for i in 1..=steps {
            let alpha = qr.alpha + (2.0 - qr.alpha) * i as f64 / steps as f64;
            let next = regime_classify(&RegimeQuery { alpha, ..qr }).verdicts;
            prop_assert!(!prev.global_mild.granted || next.global_mild.granted, "global lost at α = {}", alpha);
            prop_assert!(!prev.local_mild.granted || next.local_mild.granted, "local lost at α = {}", alpha);
            prop_assert!(!prev.martingale.granted || next.martingale.granted);
            prev = next;
        }
    }
}

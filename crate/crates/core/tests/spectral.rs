use std::f64::consts::PI;

use active_scalar::spectral::{
    dealias, fractional_laplacian, partial, semigroup_apply, sobolev_norm, stream_function, to_physical, to_spectral,
    PhysicalField, SpectralField, TorusGrid, Wavenumber,
};
use active_scalar::Complex64;
use approx::assert_relative_eq;
use proptest::prelude::*;

fn grid(d: usize, n: usize) -> TorusGrid {
    TorusGrid::new(d, n).unwrap()
}

/// Direct O(N) evaluation of `(1/N) Σ_x f(x) e^{−ik·x}`.
fn naive_coeff(f: &PhysicalField, k: [i64; 2]) -> Complex64 {
    let g = f.grid();
    let n = g.n();
    let mut acc = Complex64::new(0.0, 0.0);
    for (idx, v) in f.values().iter().enumerate() {
        let (i, j) = (idx / n, idx % n);
        let phase = 2.0 * PI * (k[0] * i as i64 + k[1] * j as i64) as f64 / n as f64;
        acc += v * Complex64::new(phase.cos(), -phase.sin());
    }
    acc / g.len() as f64
}

fn physical(g: TorusGrid, values: Vec<f64>) -> PhysicalField {
    PhysicalField::new(g, values).unwrap()
}

fn band_limited(g: TorusGrid, values: Vec<f64>) -> SpectralField {
    dealias(&to_spectral(&physical(g, values)).unwrap())
}

#[test]
fn transform_matches_direct_sum() {
    let g = grid(2, 8);
    let values: Vec<f64> = (0..64).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0 + (i as f64).sin()).collect();
    let f = physical(g, values);
    let spec = to_spectral(&f).unwrap();
    for k in [[0, 0], [1, 0], [0, -3], [2, 3], [4, 1], [4, 4], [-3, -2]] {
        let got = spec.coeff(Wavenumber::new(&k));
        let want = naive_coeff(&f, k);
        assert!((got - want).norm() < 1e-13, "k = {k:?}: {got} vs {want}");
    }
}

#[test]
fn constant_and_cosine_examples() {
    let g = grid(2, 16);
    let one = to_spectral(&PhysicalField::from_fn(g, |_| 1.0)).unwrap();
    assert_relative_eq!(one.coeff(Wavenumber::new(&[0, 0])).re, 1.0, epsilon = 1e-15);
    assert!((one.l2_norm_sq() - 1.0).abs() < 1e-15);

    let c = to_spectral(&PhysicalField::from_fn(g, |x| x[0].cos())).unwrap();
    for k in [[1, 0], [-1, 0]] {
        assert!((c.coeff(Wavenumber::new(&k)) - Complex64::new(0.5, 0.0)).norm() < 1e-12);
    }
    assert!((c.l2_norm_sq() - 0.5).abs() < 1e-12);
}

#[test]
fn closed_form_multipliers() {
    let g = grid(1, 16);
    let f = to_spectral(&PhysicalField::from_fn(g, |x| (2.0 * x[0]).cos())).unwrap();
    let out = to_physical(&fractional_laplacian(&f, 1.5).unwrap()).unwrap();
    for (i, v) in out.values().iter().enumerate() {
        let x = 2.0 * PI * i as f64 / 16.0;
        assert!((v - 2f64.powf(1.5) * (2.0 * x).cos()).abs() < 1e-12);
    }

    let g2 = grid(2, 16);
    let f = SpectralField::from_modes(g2, &[(Wavenumber::new(&[1, 1]), 1.0, 0.0)]).unwrap();
    assert_eq!(fractional_laplacian(&f, 2.0).unwrap(), f.scaled(2.0));

    let k11 = Wavenumber::new(&[1, 1]);
    let m = SpectralField::from_modes(g2, &[(k11, 1.0, 0.0)]).unwrap();
    let e = semigroup_apply(&m, 1.0, 1.5, 1.0).unwrap();
    assert_relative_eq!(e.coeff(k11).re / m.coeff(k11).re, (-(2f64.powf(0.75))).exp(), max_relative = 1e-14);
    assert_eq!(semigroup_apply(&m, 1.0, 1.5, 0.0).unwrap(), m);
}

#[test]
fn sobolev_norm_examples() {
    let g = grid(1, 32);
    let c = to_spectral(&PhysicalField::from_fn(g, |x| x[0].cos())).unwrap();
    for s in [-1.0, 0.0, 0.5, 1.0, 2.5] {
        assert_relative_eq!(sobolev_norm(&c, s, 2.0).unwrap(), 2f64.powf((s - 1.0) / 2.0), max_relative = 1e-13);
    }
    // ∫ cos⁴ dμ = 3/8.
    assert_relative_eq!(sobolev_norm(&c, 0.0, 4.0).unwrap(), 0.375f64.powf(0.25), max_relative = 1e-13);
    assert_relative_eq!(sobolev_norm(&c, 0.0, f64::INFINITY).unwrap(), 1.0, max_relative = 1e-14);
}

#[test]
fn stream_function_examples() {
    let g = grid(1, 16);
    let f = |m: f64| to_spectral(&PhysicalField::from_fn(g, move |x| (m * x[0]).cos())).unwrap();
    assert!(stream_function(&f(1.0), 2.0).unwrap().sub(&f(1.0)).unwrap().l2_norm() < 1e-15);
    assert!(stream_function(&f(2.0), 2.0).unwrap().sub(&f(2.0).scaled(0.25)).unwrap().l2_norm() < 1e-15);
}

#[test]
fn dealias_cuts_at_two_thirds() {
    let g = grid(2, 12);
    let mut full = SpectralField::zeros(g);
    for c in full.coeffs_mut() {
        *c = Complex64::new(1.0, 0.0);
    }
    let cut = dealias(&full);
    for (i, c) in cut.coeffs().iter().enumerate() {
        let k = g.wavenumber(i);
        let kept = (0..2).all(|j| 3 * k.get(j).abs() <= 12);
        assert_eq!(*c == Complex64::new(1.0, 0.0), kept, "k = {k:?}");
    }
    let nyq = SpectralField::from_modes(g, &[(Wavenumber::new(&[6, 0]), 1.0, 0.0)]).unwrap();
    assert_eq!(dealias(&nyq).l2_norm(), 0.0);
}

#[test]
fn parameter_errors() {
    let f = SpectralField::zeros(grid(1, 8));
    assert!(fractional_laplacian(&f, 0.0).is_err());
    assert!(fractional_laplacian(&f, 2.5).is_err());
    assert!(semigroup_apply(&f, 1.0, 1.0, -0.1).is_err());
    assert!(sobolev_norm(&f, 0.0, 1.5).is_err());
    assert!(PhysicalField::new(grid(1, 8), vec![f64::NAN; 8]).is_err());
    assert!(TorusGrid::new(4, 8).is_err());
}

fn values(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-10.0..10.0f64, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn physical_round_trip(v in values(256)) {
        let g = grid(2, 16);
        let f = physical(g, v.clone());
        let back = to_physical(&to_spectral(&f).unwrap()).unwrap();
        for (a, b) in back.values().iter().zip(&v) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn parseval(v in values(512)) {
        let g = grid(1, 512);
        let f = physical(g, v.clone());
        let grid_l2 = (v.iter().map(|x| x * x).sum::<f64>() / 512.0).sqrt();
        prop_assert!((to_spectral(&f).unwrap().l2_norm() - grid_l2).abs() <= 1e-12 * grid_l2.max(1.0));
    }

    #[test]
    fn semigroup_composes_and_contracts(v in values(256), nu in 0.01..3.0f64, alpha in 0.05..=2.0f64,
                                        t in 0.0..2.0f64, s in 0.0..2.0f64, sob in -3.0..3.0f64) {
        let f = band_limited(grid(2, 16), v);
        let two = semigroup_apply(&semigroup_apply(&f, nu, alpha, t).unwrap(), nu, alpha, s).unwrap();
        let one = semigroup_apply(&f, nu, alpha, t + s).unwrap();
        prop_assert!(two.sub(&one).unwrap().l2_norm() <= 1e-12 * f.l2_norm().max(1e-300));
        prop_assert!(sobolev_norm(&one, sob, 2.0).unwrap() <= sobolev_norm(&f, sob, 2.0).unwrap());
    }

    #[test]
    fn derivative_of_plane_wave(k0 in -5i64..=5, k1 in -5i64..=5, phase in 0.0..6.28f64) {
        let g = grid(2, 16);
        let f = to_spectral(&PhysicalField::from_fn(g, |x| (k0 as f64 * x[0] + k1 as f64 * x[1] + phase).sin())).unwrap();
        let d0 = to_physical(&partial(&f, 0)).unwrap();
        let want = PhysicalField::from_fn(g, |x| k0 as f64 * (k0 as f64 * x[0] + k1 as f64 * x[1] + phase).cos());
        for (a, b) in d0.values().iter().zip(want.values()) {
            prop_assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn fractional_laplacian_is_linear_and_kills_mean(v in values(64), c in -5.0..5.0f64, alpha in 0.1..=2.0f64) {
        let f = to_spectral(&physical(grid(1, 64), v)).unwrap();
        let a = fractional_laplacian(&f.scaled(c), alpha).unwrap();
        let b = fractional_laplacian(&f, alpha).unwrap().scaled(c);
        prop_assert!(a.sub(&b).unwrap().l2_norm() <= 1e-12 * b.l2_norm().max(1.0));
        prop_assert_eq!(a.mean(), 0.0);
    }

    #[test]
    fn dealias_is_idempotent(v in values(256)) {
        let f = to_spectral(&physical(grid(2, 16), v)).unwrap();
        let once = dealias(&f);
        prop_assert_eq!(dealias(&once), once);
    }
}

use std::fmt;

use num_complex::Complex64;

use super::field::{to_physical_unchecked, SpectralField};
use super::grid::Wavenumber;
use crate::error::{param, Result};

type Symbol = dyn Fn(Wavenumber) -> Complex64 + Send + Sync;

/// Diagonal Fourier multiplier `(Mf)̂(k) = m(k) f̂(k)`.
pub struct MultiplierOp {
    name: String,
    symbol: Box<Symbol>,
}

impl fmt::Debug for MultiplierOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierOp").field("name", &self.name).finish()
    }
}

impl MultiplierOp {
    pub fn new(name: impl Into<String>, symbol: impl Fn(Wavenumber) -> Complex64 + Send + Sync + 'static) -> Self {
        MultiplierOp { name: name.into(), symbol: Box::new(symbol) }
    }

    /// Real-valued symbol.
    pub fn real(name: impl Into<String>, symbol: impl Fn(Wavenumber) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(name, move |k| Complex64::new(symbol(k), 0.0))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbol(&self, k: Wavenumber) -> Complex64 {
        (self.symbol)(k)
    }

    pub fn apply(&self, f: &SpectralField) -> SpectralField {
        f.map_modes(|k| (self.symbol)(k))
    }

    /// `A_α = (−Δ)^{α/2}` with symbol `|k|^α`.
    pub fn fractional_laplacian(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::real(format!("(-Δ)^{}", alpha / 2.0), move |k| abs_pow(k, alpha)))
    }

    /// `e^{−ν A_α t}`.
    pub fn semigroup(nu: f64, alpha: f64, t: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(nu > 0.0 && nu.is_finite()) {
            return param(format!("viscosity ν = {nu} must be positive"));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return param(format!("time t = {t} must be non-negative"));
        }
        Ok(Self::real(format!("exp(-{nu}·A_{alpha}·{t})"), move |k| (-nu * abs_pow(k, alpha) * t).exp()))
    }

    /// Bessel potential `(1 − Δ)^{s/2}`.
    pub fn bessel(s: f64) -> Self {
        Self::real(format!("(1-Δ)^{}", s / 2.0), move |k| (1.0 + k.norm_sq() as f64).powf(0.5 * s))
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return param(format!("fractional order α = {alpha} must lie in (0, 2]"));
    }
    Ok(())
}

/// `|k|^p` with `0^p = 0`. Uses `(|k|²)^{p/2}`, exact for `p = 2`.
#[inline]
pub(crate) fn abs_pow(k: Wavenumber, p: f64) -> f64 {
    let k2 = k.norm_sq();
    if k2 == 0 {
        0.0
    } else {
        (k2 as f64).powf(0.5 * p)
    }
}

/// `(−Δ)^{α/2} f`, annihilating the mean.
pub fn fractional_laplacian(f: &SpectralField, alpha: f64) -> Result<SpectralField> {
    Ok(MultiplierOp::fractional_laplacian(alpha)?.apply(f))
}

/// `e^{−ν A_α t} f`; the mean is left untouched.
pub fn semigroup_apply(f: &SpectralField, nu: f64, alpha: f64, t: f64) -> Result<SpectralField> {
    Ok(MultiplierOp::semigroup(nu, alpha, t)?.apply(f))
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 2.0) || q.is_nan() {
        return param(format!("integrability index q = {q} must be ≥ 2 (or ∞)"));
    }
    Ok(())
}

/// `|f|_{H^{s,q}}`: exact spectral sum at `q = 2`, otherwise the grid `L^q`
/// norm of `(1 − Δ)^{s/2} f`.
pub fn sobolev_norm(f: &SpectralField, s: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    if !s.is_finite() {
        return param(format!("smoothness s = {s} must be finite"));
    }
    if q == 2.0 {
        let sum: f64 = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| (1.0 + f.grid().wavenumber(i).norm_sq() as f64).powf(s) * c.norm_sqr())
            .sum();
        return Ok(sum.sqrt());
    }
    let g = if s == 0.0 { f.clone() } else { MultiplierOp::bessel(s).apply(f) };
    Ok(to_physical_unchecked(&g).lq_norm(q))
}

/// Homogeneous seminorm `(Σ_{k≠0} |k|^{2s} |f̂(k)|²)^{1/2}`.
pub fn homogeneous_norm(f: &SpectralField, s: f64) -> f64 {
    f.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| abs_pow(f.grid().wavenumber(i), 2.0 * s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Two-thirds rule truncation.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    dealias_in_place(&mut out);
    out
}

pub(crate) fn dealias_in_place(f: &mut SpectralField) {
    let grid = *f.grid();
    for (i, c) in f.coeffs_mut().iter_mut().enumerate() {
        if !grid.in_dealias_band(grid.wavenumber(i)) {
            *c = Complex64::default();
        }
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if !(1.0..=2.0).contains(&gamma) {
        return param(format!("stream-function order γ = {gamma} must lie in [1, 2]"));
    }
    Ok(())
}

/// Solves `θ = (−Δ)^{γ/2} ψ` in the mean-zero gauge.
pub fn stream_function(theta: &SpectralField, gamma: f64) -> Result<SpectralField> {
    check_gamma(gamma)?;
    Ok(theta.map_modes(|k| {
        if k.is_zero() {
            Complex64::default()
        } else {
            Complex64::new(abs_pow(k, -gamma), 0.0)
        }
    }))
}

/// `∂/∂x_axis`, symbol `i k_axis`, zero on Nyquist planes where the odd
/// symbol has no real counterpart.
pub fn partial(f: &SpectralField, axis: usize) -> SpectralField {
    let grid = *f.grid();
    f.map_modes(|k| {
        if grid.is_nyquist(k) {
            Complex64::default()
        } else {
            Complex64::new(0.0, k.get(axis) as f64)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{to_physical, to_spectral, PhysicalField, TorusGrid};

    fn field(d: usize, n: usize, f: impl Fn(&[f64]) -> f64) -> SpectralField {
        to_spectral(&PhysicalField::from_fn(TorusGrid::new(d, n).unwrap(), f)).unwrap()
    }

    fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
        a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn fractional_laplacian_closed_forms() {
        let f = field(1, 16, |x| (2.0 * x[0]).cos());
        let out = fractional_laplacian(&f, 1.5).unwrap();
        let expect = f.scaled(2f64.powf(1.5));
        assert!(max_diff(&out, &expect) < 1e-14);
        assert!((2f64.powf(1.5) - 2.8284).abs() < 1e-4);

        let c = field(2, 16, |_| 3.0);
        for alpha in [0.3, 1.0, 2.0] {
            assert!(fractional_laplacian(&c, alpha).unwrap().l2_norm() == 0.0);
        }

        let g = field(2, 16, |x| (x[0] + x[1]).cos());
        let out = fractional_laplacian(&g, 2.0).unwrap();
        assert!(max_diff(&out, &g.scaled(2.0)) < 1e-14);
    }

    #[test]
    fn alpha_validation() {
        let f = field(1, 8, |x| x[0].sin());
        assert!(fractional_laplacian(&f, 0.0).is_err());
        assert!(fractional_laplacian(&f, 2.1).is_err());
        assert!(semigroup_apply(&f, 1.0, 1.0, -0.1).is_err());
        assert!(semigroup_apply(&f, 0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn semigroup_single_mode_factor() {
        let g = TorusGrid::new(2, 16).unwrap();
        let k = Wavenumber::new(&[1, 1]);
        let f = SpectralField::from_modes(g, &[(k, 1.0, 0.0)]).unwrap();
        let out = semigroup_apply(&f, 1.0, 1.5, 1.0).unwrap();
        let factor = out.coeff(k).re / f.coeff(k).re;
        assert!((factor - (-(2f64).powf(0.75)).exp()).abs() < 1e-14);
        assert!((factor - 0.186040).abs() < 1e-6);
        let id = semigroup_apply(&f, 1.0, 1.5, 0.0).unwrap();
        assert_eq!(id, f);
    }

    #[test]
    fn sobolev_norm_closed_forms() {
        let f = field(1, 32, |x| x[0].cos());
        for s in [-1.0, 0.0, 0.5, 1.0, 2.0] {
            let got = sobolev_norm(&f, s, 2.0).unwrap();
            assert!((got - 2f64.powf((s - 1.0) / 2.0)).abs() < 1e-14, "s={s}");
        }
        // exact ∫cos⁴ dμ = 3/8 by trapezoidal quadrature on a fine grid
        let m = 4096;
        let quad: f64 = (0..m)
            .map(|j| (2.0 * std::f64::consts::PI * j as f64 / m as f64).cos().powi(4))
            .sum::<f64>()
            / m as f64;
        assert!((quad - 0.375).abs() < 1e-14);
        let got = sobolev_norm(&f, 0.0, 4.0).unwrap();
        assert!((got - quad.powf(0.25)).abs() < 1e-12);
        assert!((got - 0.7825).abs() < 1e-4);
        let inf = sobolev_norm(&f, 0.0, f64::INFINITY).unwrap();
        assert!((inf - 1.0).abs() < 1e-12);
        assert!(sobolev_norm(&f, 0.0, 1.5).is_err());
    }

    #[test]
    fn dealias_rules() {
        let g = TorusGrid::new(1, 64).unwrap();
        let low = SpectralField::from_modes(g, &[(Wavenumber::new(&[21]), 1.0, 0.5)]).unwrap();
        assert_eq!(dealias(&low), low);
        let nyq = SpectralField::from_modes(g, &[(Wavenumber::new(&[32]), 1.0, 0.0)]).unwrap();
        assert_eq!(dealias(&nyq).l2_norm(), 0.0);
        let f = field(1, 64, |x| (x[0] * 3.0).sin().exp());
        assert_eq!(dealias(&dealias(&f)), dealias(&f));
    }

    #[test]
    fn stream_function_inverts_fractional_laplacian() {
        let f = field(1, 16, |x| x[0].cos());
        assert!(max_diff(&stream_function(&f, 2.0).unwrap(), &f) < 1e-15);
        let f2 = field(1, 16, |x| (2.0 * x[0]).cos());
        assert!(max_diff(&stream_function(&f2, 2.0).unwrap(), &f2.scaled(0.25)) < 1e-15);

        let theta = field(2, 16, |x| 0.7 + (x[0] - 2.0 * x[1]).sin() + (3.0 * x[1]).cos());
        for gamma in [1.0, 1.3, 2.0] {
            let psi = stream_function(&theta, gamma).unwrap();
            let back = MultiplierOp::real("", move |k| abs_pow(k, gamma)).apply(&psi);
            let mut expect = theta.clone();
            expect.coeffs_mut()[0] = Complex64::default();
            assert!(max_diff(&back, &expect) < 1e-12);
        }
        assert!(stream_function(&theta, 0.5).is_err());
    }

    #[test]
    fn partial_derivative_of_sine() {
        let f = field(2, 16, |x| (2.0 * x[1]).sin());
        let d = to_physical(&partial(&f, 1)).unwrap();
        let g = *f.grid();
        for (i, v) in d.values().iter().enumerate() {
            assert!((v - 2.0 * (2.0 * g.point(i)[1]).cos()).abs() < 1e-12);
        }
    }
}

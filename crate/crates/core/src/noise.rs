//! Q-Wiener increments, Nemytskii diffusion operators and the
//! Hilbert–Schmidt surrogate for the radonifying norm of `G(θ)Q^{1/2}`.
//!
//! The covariance is diagonal on the real trigonometric basis
//! `{1, √2 cos k·x, √2 sin k·x}` with eigenvalue `q_k` shared by the cosine
//! and sine of each pair. Only modes with `|k|_∞ ≤ kmax` are driven;
//! Nyquist modes are never driven because their sine vanishes on the grid.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::spectral::{to_physical, to_physical_unchecked, PhysicalField, SpectralField, TorusGrid, Wavenumber};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovarianceKind {
    /// `q_k = a (1 + |k|²)^{−r}`.
    PowerLaw { a: f64, r: f64 },
    /// `Q = I` on the truncation.
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSpec {
    pub kind: CovarianceKind,
    pub kmax: usize,
}

impl CovarianceSpec {
    pub fn power_law(a: f64, r: f64, kmax: usize) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return param(format!("covariance amplitude a = {a} must be positive"));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return param(format!("covariance decay r = {r} must be non-negative"));
        }
        Ok(CovarianceSpec { kind: CovarianceKind::PowerLaw { a, r }, kmax })
    }

    pub fn identity(kmax: usize) -> Self {
        CovarianceSpec { kind: CovarianceKind::Identity, kmax }
    }

    pub fn eigenvalue(&self, k: Wavenumber) -> f64 {
        match self.kind {
            CovarianceKind::PowerLaw { a, r } => a * (1.0 + k.norm_sq() as f64).powf(-r),
            CovarianceKind::Identity => 1.0,
        }
    }

    /// Whether `Q` would stay trace class without the `kmax` truncation.
    pub fn is_trace_class_untruncated(&self, d: usize) -> bool {
        match self.kind {
            CovarianceKind::PowerLaw { r, .. } => r > d as f64 / 2.0,
            CovarianceKind::Identity => false,
        }
    }

    pub fn check(&self, grid: &TorusGrid) -> Result<()> {
        if self.kmax > grid.n() / 2 {
            return param(format!("noise kmax = {} exceeds n/2 = {}", self.kmax, grid.n() / 2));
        }
        Ok(())
    }

    /// Representatives of the driven pairs: `0` and the positive member of
    /// each `{k, −k}`, in lexicographic order.
    pub fn driven_modes(&self, grid: &TorusGrid) -> Result<Vec<Wavenumber>> {
        self.check(grid)?;
        Ok(grid
            .box_modes(self.kmax)
            .into_iter()
            .filter(|k| (k.is_zero() || k.is_positive()) && !grid.is_nyquist(*k))
            .collect())
    }

    /// `Σ q_k` over the driven real basis functions.
    pub fn trace(&self, grid: &TorusGrid) -> Result<f64> {
        Ok(self
            .driven_modes(grid)?
            .into_iter()
            .map(|k| if k.is_zero() { self.eigenvalue(k) } else { 2.0 * self.eigenvalue(k) })
            .sum())
    }
}

pub fn trace(cov: &CovarianceSpec, grid: &TorusGrid) -> Result<f64> {
    cov.trace(grid)
}

/// Pointwise diffusion `G(θ)h = g(θ(·)) h(·)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiffusionSpec {
    Additive,
    Linear { c: f64 },
    Saturated { c: f64 },
}

impl DiffusionSpec {
    #[inline]
    pub fn g(&self, v: f64) -> f64 {
        match *self {
            DiffusionSpec::Additive => 1.0,
            DiffusionSpec::Linear { c } => c * v,
            DiffusionSpec::Saturated { c } => c * v / (1.0 + v * v).sqrt(),
        }
    }

    pub fn is_additive(&self) -> bool {
        matches!(self, DiffusionSpec::Additive)
    }

    /// Global Lipschitz constant of `g` (local on every ball for `Linear`).
    pub fn lipschitz_constant(&self) -> f64 {
        match *self {
            DiffusionSpec::Additive => 0.0,
            DiffusionSpec::Linear { c } | DiffusionSpec::Saturated { c } => c.abs(),
        }
    }

    /// `C` with `hs_norm(θ) ≤ C (1 + |θ|_{L²})`.
    pub fn growth_constant(&self, cov: &CovarianceSpec, grid: &TorusGrid) -> Result<f64> {
        let root_trace = cov.trace(grid)?.sqrt();
        Ok(match *self {
            DiffusionSpec::Additive => root_trace,
            DiffusionSpec::Linear { c } | DiffusionSpec::Saturated { c } => c.abs() * root_trace,
        })
    }
}

/// Independent, replayable Gaussian source for one trajectory.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// Position in the keystream, in 32-bit words.
    pub fn counter(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// `ΔW` over one step of length `dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseIncrement {
    pub field: SpectralField,
    pub dt: f64,
}

/// Coefficients `(a, b)` of `a·√2 cos k·x + b·√2 sin k·x` (just `(f̂(0), 0)`
/// at `k = 0`).
pub fn real_mode_coefficients(f: &SpectralField, k: Wavenumber) -> (f64, f64) {
    let c = f.coeff(k);
    if k.is_zero() {
        (c.re, 0.0)
    } else {
        (SQRT_2 * c.re, -SQRT_2 * c.im)
    }
}

/// Karhunen–Loève draw: every driven basis coefficient is `N(0, q_k dt)`.
pub fn sample_increment(cov: &CovarianceSpec, grid: &TorusGrid, dt: f64, rng: &mut RngStream) -> Result<NoiseIncrement> {
    if !(dt > 0.0 && dt.is_finite()) {
        return param(format!("time step dt = {dt} must be positive"));
    }
    let mut field = SpectralField::zeros(*grid);
    for k in cov.driven_modes(grid)? {
        let sd = (cov.eigenvalue(k) * dt).sqrt();
        let i = grid.index_of(k).expect("driven modes are resolved");
        let coeffs = field.coeffs_mut();
        if k.is_zero() {
            coeffs[i] = Complex64::new(sd * rng.standard_normal(), 0.0);
        } else {
            let a = sd * rng.standard_normal();
            let b = sd * rng.standard_normal();
            let c = Complex64::new(a, -b) / SQRT_2;
            coeffs[i] = c;
            coeffs[grid.conjugate_index(i)] = c.conj();
        }
    }
    Ok(NoiseIncrement { field, dt })
}

/// `g(θ(x)) · ΔW(x)` pointwise.
pub fn apply_diffusion(theta: &PhysicalField, spec: &DiffusionSpec, incr: &NoiseIncrement) -> Result<PhysicalField> {
    if theta.grid() != incr.field.grid() {
        return Err(Error::GridMismatch);
    }
    let w = to_physical(&incr.field)?;
    diffuse(theta, spec, &w)
}

pub(crate) fn diffuse(theta: &PhysicalField, spec: &DiffusionSpec, w: &PhysicalField) -> Result<PhysicalField> {
    let values: Vec<f64> = theta.values().iter().zip(w.values()).map(|(&t, &w)| spec.g(t) * w).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow("diffusion term"));
    }
    PhysicalField::new(*theta.grid(), values)
}

/// `(Σ_k q_k |g(θ) e_k|²_{L²})^{1/2}` over the driven basis. Each driven
/// pair contributes `q_k ∫ g² (2cos² + 2sin²) dμ = 2 q_k |g|²`, so the sum
/// collapses to `√tr(Q) · |g(θ)|_{L²}`.
pub fn hs_norm(theta: &SpectralField, spec: &DiffusionSpec, cov: &CovarianceSpec) -> Result<f64> {
    let tr = cov.trace(theta.grid())?;
    let g = nemytskii(theta, spec);
    Ok(tr.sqrt() * g.lq_norm(2.0))
}

fn nemytskii(theta: &SpectralField, spec: &DiffusionSpec) -> PhysicalField {
    let mut p = to_physical_unchecked(theta);
    for v in p.values_mut() {
        *v = spec.g(*v);
    }
    p
}

/// Empirical Lipschitz ratio `‖(G(u) − G(v))Q^{1/2}‖_HS / |u − v|_{L²}`.
pub fn lipschitz_probe(spec: &DiffusionSpec, cov: &CovarianceSpec, u: &SpectralField, v: &SpectralField) -> Result<f64> {
    let diff = u.sub(v)?.l2_norm();
    if diff == 0.0 {
        return Err(Error::UndefinedRatio("u = v in lipschitz_probe"));
    }
    let tr = cov.trace(u.grid())?;
    let gu = nemytskii(u, spec);
    let gv = nemytskii(v, spec);
    let gap = gu.values().iter().zip(gv.values()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / gu.values().len() as f64;
    Ok(tr.sqrt() * gap.sqrt() / diff)
}

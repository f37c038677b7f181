use num_complex::Complex64;

use super::fft::{transform, Direction};
use super::grid::{TorusGrid, Wavenumber};
use crate::error::{param, Error, Result};

/// Relative Hermitian asymmetry tolerated (and removed) by [`to_physical`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Real scalar samples on the uniform lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    grid: TorusGrid,
    values: Vec<f64>,
}

impl PhysicalField {
    pub fn new(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("physical field"));
        }
        Ok(PhysicalField { grid, values })
    }

    pub(crate) fn new_unchecked(grid: TorusGrid, values: Vec<f64>) -> Self {
        PhysicalField { grid, values }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        PhysicalField { grid, values: vec![0.0; grid.len()] }
    }

    /// Samples `f` at every lattice point; `f` receives the `d` coordinates.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let d = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.point(i)[..d])).collect();
        PhysicalField { grid, values }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `L^q` norm under the normalized measure; `q = ∞` gives the max norm.
    pub fn lq_norm(&self, q: f64) -> f64 {
        if q.is_infinite() {
            return self.values.iter().fold(0.0, |m, v| m.max(v.abs()));
        }
        let mean = self.values.iter().map(|v| v.abs().powf(q)).sum::<f64>() / self.values.len() as f64;
        mean.powf(1.0 / q)
    }

    /// `∫ f g dμ` by grid quadrature.
    pub fn integrate_product(&self, other: &PhysicalField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() / self.values.len() as f64
    }
}

/// Fourier coefficients `f̂(k) = ∫ f e^{−ik·x} dμ` on the lattice, stored
/// in the grid's flat layout.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: TorusGrid) -> Self {
        SpectralField { grid, coeffs: vec![Complex64::default(); grid.len()] }
    }

    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: coeffs.len() });
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub(crate) fn from_coeffs_unchecked(grid: TorusGrid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        SpectralField { grid, coeffs }
    }

    /// Real field `Σ_k (a_k cos k·x + b_k sin k·x)` built from `(k, a_k, b_k)`.
    /// Repeated or opposite wavenumbers accumulate.
    pub fn from_modes(grid: TorusGrid, modes: &[(Wavenumber, f64, f64)]) -> Result<Self> {
        let mut f = SpectralField::zeros(grid);
        for &(k, a, b) in modes {
            let Some(i) = grid.index_of(k) else {
                return param(format!("mode {k} is not resolved on an n = {} grid", grid.n()));
            };
            if grid.is_nyquist(k) && b != 0.0 {
                return param(format!("sine component at Nyquist mode {k} vanishes on the grid"));
            }
            if k.is_zero() {
                f.coeffs[i] += a;
            } else if grid.is_nyquist(k) {
                f.coeffs[i] += a;
            } else {
                let j = grid.conjugate_index(i);
                f.coeffs[i] += Complex64::new(0.5 * a, -0.5 * b);
                f.coeffs[j] += Complex64::new(0.5 * a, 0.5 * b);
            }
        }
        Ok(f)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at `k`, zero when `k` is not resolved.
    pub fn coeff(&self, k: Wavenumber) -> Complex64 {
        self.grid.index_of(k).map_or(Complex64::default(), |i| self.coeffs[i])
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub(crate) fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `Σ_k |f̂(k)|²`, equal to `|f|²_{L²}` by Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `⟨f, g⟩ = ∫ f ḡ dμ = Σ_k f̂(k) conj(ĝ(k))`.
    pub fn inner(&self, other: &SpectralField) -> Result<Complex64> {
        self.check_grid(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum())
    }

    pub fn scaled(&self, c: f64) -> SpectralField {
        SpectralField { grid: self.grid, coeffs: self.coeffs.iter().map(|z| z * c).collect() }
    }

    /// `self += c · other`.
    pub fn axpy(&mut self, c: f64, other: &SpectralField) -> Result<()> {
        self.check_grid(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * c;
        }
        Ok(())
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// Multiplies every coefficient by `m(k)`.
    pub fn map_modes(&self, m: impl Fn(Wavenumber) -> Complex64) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * m(self.grid.wavenumber(i)))
            .collect();
        SpectralField { grid: self.grid, coeffs }
    }

    /// Largest `|f̂(k) − conj f̂(−k)|`, relative to the largest coefficient.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = self.grid.conjugate_index(i);
            worst = worst.max((c - self.coeffs[j].conj()).norm());
        }
        worst / scale
    }
}

/// Forward transform under the normalized measure.
pub fn to_spectral(f: &PhysicalField) -> Result<SpectralField> {
    if f.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("to_spectral input"));
    }
    Ok(to_spectral_unchecked(f))
}

pub(crate) fn to_spectral_unchecked(f: &PhysicalField) -> SpectralField {
    let grid = f.grid;
    let mut data: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(&grid, &mut data, Direction::Forward);
    let inv = 1.0 / grid.len() as f64;
    for c in &mut data {
        *c *= inv;
    }
    // Enforce exact symmetry so downstream multipliers see a clean spectrum.
    for i in 0..data.len() {
        let j = grid.conjugate_index(i);
        if j > i {
            let avg = 0.5 * (data[i] + data[j].conj());
            data[i] = avg;
            data[j] = avg.conj();
        } else if j == i {
            data[i].im = 0.0;
        }
    }
    SpectralField { grid, coeffs: data }
}

/// Inverse transform. Asymmetry up to [`HERMITIAN_TOLERANCE`] is projected
/// away; larger asymmetry signals a corrupted state.
pub fn to_physical(f: &SpectralField) -> Result<PhysicalField> {
    let asym = f.hermitian_asymmetry();
    if !asym.is_finite() {
        return Err(Error::NonFinite("to_physical input"));
    }
    if asym > HERMITIAN_TOLERANCE {
        return Err(Error::Asymmetric { asymmetry: asym });
    }
    Ok(to_physical_unchecked(f))
}

/// Real part of the inverse transform, which equals the inverse transform of
/// the Hermitian part of `f`.
pub(crate) fn to_physical_unchecked(f: &SpectralField) -> PhysicalField {
    let mut data = f.coeffs.clone();
    transform(&f.grid, &mut data, Direction::Inverse);
    PhysicalField::new_unchecked(f.grid, data.into_iter().map(|c| c.re).collect())
}

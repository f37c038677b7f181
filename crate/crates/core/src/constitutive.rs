//! Velocity laws `θ ↦ u` and the transport drift `B(θ) = u·∇θ`.
//!
//! Two symbol families cover every supported model:
//!
//! * rotational (`ROT`): `û_j(k) = i (Sk)_j |k|^{−γ} θ̂(k)`, i.e. `u = S∇ψ`
//!   with `(−Δ)^{γ/2} ψ = θ`. Antisymmetric `S` gives `k·Sk = 0`, hence a
//!   divergence-free velocity.
//! * local (`LOC`): `û_j(k) = σ_j |k|^{1−γ} θ̂(k)`; at `γ = 1` this is
//!   `u = σ θ` (Burgers).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::spectral::{
    abs_pow, check_gamma, dealias, partial, to_physical_unchecked, to_spectral_unchecked, PhysicalField, SpectralField,
    TorusGrid, Wavenumber,
};
use crate::spectral::dealias_in_place;

#[derive(Clone, Debug, PartialEq)]
pub enum LawFamily {
    /// Row-major `d×d` matrix `S`.
    Rotational { matrix: Vec<f64> },
    Local { sigma: Vec<f64> },
}

/// Declared regularity of a non-divergence-free law; selects between the
/// two non-free mode categories.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularity {
    #[default]
    Standard,
    Smooth,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VelocityLaw {
    name: String,
    dim: usize,
    gamma: f64,
    family: LawFamily,
    regularity: Regularity,
}

/// Named constitutive laws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Preset {
    Sqg,
    ModifiedQg { gamma: f64 },
    NseVorticity2d,
    Burgers1d,
    HilbertTransport1d,
}

impl Preset {
    pub const NAMES: [&'static str; 5] = ["sqg", "modified_qg", "nse_vorticity_2d", "burgers_1d", "hilbert_transport_1d"];

    /// Looks up a preset by name; `modified_qg` needs `gamma`.
    pub fn from_name(name: &str, gamma: Option<f64>) -> Result<Preset> {
        let preset = match name {
            "sqg" => Preset::Sqg,
            "modified_qg" => match gamma {
                Some(gamma) => Preset::ModifiedQg { gamma },
                None => return param("modified_qg requires gamma"),
            },
            "nse_vorticity_2d" => Preset::NseVorticity2d,
            "burgers_1d" => Preset::Burgers1d,
            "hilbert_transport_1d" => Preset::HilbertTransport1d,
            other => return param(format!("unknown velocity law preset '{other}'")),
        };
        if gamma.is_some() && !matches!(preset, Preset::ModifiedQg { .. }) {
            return param(format!("preset '{name}' has a fixed gamma"));
        }
        Ok(preset)
    }
}

impl FromStr for Preset {
    type Err = Error;

    /// Accepts the bare names and `modified_qg(γ)`.
    fn from_str(s: &str) -> Result<Preset> {
        let s = s.trim();
        if let Some(arg) = s.strip_prefix("modified_qg(").and_then(|r| r.strip_suffix(')')) {
            let gamma = arg
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parameter(format!("bad gamma in '{s}'")))?;
            return Preset::from_name("modified_qg", Some(gamma));
        }
        Preset::from_name(s, None)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::Sqg => f.write_str("sqg"),
            Preset::ModifiedQg { gamma } => write!(f, "modified_qg({gamma})"),
            Preset::NseVorticity2d => f.write_str("nse_vorticity_2d"),
            Preset::Burgers1d => f.write_str("burgers_1d"),
            Preset::HilbertTransport1d => f.write_str("hilbert_transport_1d"),
        }
    }
}

impl VelocityLaw {
    pub fn rotational(name: impl Into<String>, dim: usize, matrix: Vec<f64>, gamma: f64) -> Result<Self> {
        check_dim(dim)?;
        if matrix.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: matrix.len() });
        }
        check_law_gamma(gamma)?;
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("velocity law matrix"));
        }
        Ok(VelocityLaw {
            name: name.into(),
            dim,
            gamma,
            family: LawFamily::Rotational { matrix },
            regularity: Regularity::Standard,
        })
    }

    pub fn local(name: impl Into<String>, sigma: Vec<f64>, gamma: f64) -> Result<Self> {
        let dim = sigma.len();
        check_dim(dim)?;
        check_law_gamma(gamma)?;
        if sigma.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("velocity law coefficients"));
        }
        Ok(VelocityLaw {
            name: name.into(),
            dim,
            gamma,
            family: LawFamily::Local { sigma },
            regularity: Regularity::Standard,
        })
    }

    pub fn preset(p: Preset) -> Result<Self> {
        let name = p.to_string();
        match p {
            Preset::Sqg => Self::rotational(name, 2, vec![0.0, -1.0, 1.0, 0.0], 1.0),
            Preset::ModifiedQg { gamma } => {
                check_gamma(gamma)?;
                Self::rotational(name, 2, vec![0.0, -1.0, 1.0, 0.0], gamma)
            }
            // θ = Δψ flips the sign of ψ relative to (−Δ)ψ = θ; absorbed into S.
            Preset::NseVorticity2d => Self::rotational(name, 2, vec![0.0, 1.0, -1.0, 0.0], 2.0),
            Preset::Burgers1d => Self::local(name, vec![1.0], 1.0),
            // u = Hθ with symbol −i sign(k): sin ↦ −cos.
            Preset::HilbertTransport1d => Self::rotational(name, 1, vec![-1.0], 1.0),
        }
    }

    pub fn with_regularity(mut self, regularity: Regularity) -> Self {
        self.regularity = regularity;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn family(&self) -> &LawFamily {
        &self.family
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    /// `‖S + Sᵀ‖ = 0` for a rotational law.
    pub fn is_divergence_free(&self) -> bool {
        match &self.family {
            LawFamily::Rotational { matrix } => {
                let d = self.dim;
                (0..d).all(|i| (0..d).all(|j| matrix[i * d + j] + matrix[j * d + i] == 0.0))
            }
            LawFamily::Local { .. } => false,
        }
    }

    /// Symbol of component `j`; Nyquist planes are zeroed for the odd
    /// rotational symbol.
    pub fn symbol(&self, k: Wavenumber, j: usize, nyquist: bool) -> Complex64 {
        match &self.family {
            LawFamily::Rotational { matrix } => {
                if k.is_zero() || nyquist {
                    return Complex64::default();
                }
                let d = self.dim;
                let sk: f64 = (0..d).map(|c| matrix[j * d + c] * k.get(c) as f64).sum();
                Complex64::new(0.0, sk * abs_pow(k, -self.gamma))
            }
            LawFamily::Local { sigma } => {
                if k.is_zero() {
                    if self.gamma == 1.0 {
                        Complex64::new(sigma[j], 0.0)
                    } else {
                        Complex64::default()
                    }
                } else {
                    Complex64::new(sigma[j] * abs_pow(k, 1.0 - self.gamma), 0.0)
                }
            }
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if !(1..=3).contains(&dim) {
        return param(format!("velocity law dimension {dim} must be 1, 2 or 3"));
    }
    Ok(())
}

fn check_law_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return param(format!("velocity law order γ = {gamma} must be ≥ 1"));
    }
    Ok(())
}

/// Mode categories: free divergence (`Ca`) and the two non-free
/// categories distinguished only by their initial-smoothness floor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeTag {
    Ca,
    Cb,
    Cc,
}

impl fmt::Display for ModeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeTag::Ca => "C_a",
            ModeTag::Cb => "C_b",
            ModeTag::Cc => "C_c",
        })
    }
}

impl FromStr for ModeTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "").as_str() {
            "ca" => Ok(ModeTag::Ca),
            "cb" => Ok(ModeTag::Cb),
            "cc" => Ok(ModeTag::Cc),
            _ => param(format!("unknown mode category '{s}' (expected ca, cb or cc)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeCategory {
    pub tag: ModeTag,
}

impl ModeCategory {
    pub fn new(tag: ModeTag) -> Self {
        ModeCategory { tag }
    }

    /// Minimal initial smoothness: `δ ≥ 0` for `Ca`/`Cb`, `δ > 1/2` for `Cc`.
    /// Returns the floor and whether it is strict.
    pub fn delta_floor(&self) -> (f64, bool) {
        match self.tag {
            ModeTag::Ca | ModeTag::Cb => (0.0, false),
            ModeTag::Cc => (0.5, true),
        }
    }

    pub fn admits_delta(&self, delta: f64) -> bool {
        match self.delta_floor() {
            (floor, true) => delta > floor,
            (floor, false) => delta >= floor,
        }
    }
}

pub fn classify_mode(law: &VelocityLaw) -> ModeCategory {
    let tag = if law.is_divergence_free() {
        ModeTag::Ca
    } else {
        match law.regularity {
            Regularity::Standard => ModeTag::Cb,
            Regularity::Smooth => ModeTag::Cc,
        }
    };
    ModeCategory { tag }
}

fn check_law_grid(theta: &SpectralField, law: &VelocityLaw) -> Result<()> {
    if theta.grid().dim() != law.dim {
        return Err(Error::DimensionMismatch { expected: law.dim, found: theta.grid().dim() });
    }
    Ok(())
}

/// Velocity components `u_j = R_j θ`.
pub fn velocity(theta: &SpectralField, law: &VelocityLaw) -> Result<Vec<SpectralField>> {
    check_law_grid(theta, law)?;
    let grid = *theta.grid();
    Ok((0..law.dim)
        .map(|j| theta.map_modes(|k| law.symbol(k, j, grid.is_nyquist(k))))
        .collect())
}

/// `Σ_j ∂_j u_j`.
pub fn divergence(u: &[SpectralField]) -> Result<SpectralField> {
    let Some(first) = u.first() else {
        return param("divergence of an empty vector field");
    };
    let grid = *first.grid();
    if u.len() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: u.len() });
    }
    let mut out = SpectralField::zeros(grid);
    for (j, comp) in u.iter().enumerate() {
        first.check_grid(comp)?;
        out.axpy(1.0, &partial(comp, j))?;
    }
    Ok(out)
}

/// `∇θ` spectrally.
pub fn gradient(theta: &SpectralField) -> Vec<SpectralField> {
    (0..theta.grid().dim()).map(|j| partial(theta, j)).collect()
}

/// Pseudo-spectral `B(θ) = u·∇θ`: dealiased inputs, physical-space
/// product, dealiased output.
pub fn nonlinear_term(theta: &SpectralField, law: &VelocityLaw) -> Result<SpectralField> {
    check_law_grid(theta, law)?;
    let grid = *theta.grid();
    let th = dealias(theta);
    let u = velocity(&th, law)?;
    let mut acc = vec![0.0; grid.len()];
    for (j, uj) in u.iter().enumerate() {
        let uj = to_physical_unchecked(uj);
        let dj = to_physical_unchecked(&partial(&th, j));
        for ((a, x), y) in acc.iter_mut().zip(uj.values()).zip(dj.values()) {
            *a += x * y;
        }
    }
    if acc.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow("transport term"));
    }
    let mut out = to_spectral_unchecked(&PhysicalField::new_unchecked(grid, acc));
    dealias_in_place(&mut out);
    Ok(out)
}

/// [`nonlinear_term`] with the velocity, derivative and dealiasing tables
/// built once per grid; results are bitwise identical.
#[derive(Clone, Debug)]
pub struct TransportOp {
    grid: TorusGrid,
    band: Vec<bool>,
    velocity: Vec<Vec<Complex64>>,
    derivative: Vec<Vec<Complex64>>,
}

impl TransportOp {
    pub fn new(grid: TorusGrid, law: &VelocityLaw) -> Result<Self> {
        if grid.dim() != law.dim {
            return Err(Error::DimensionMismatch { expected: law.dim, found: grid.dim() });
        }
        let modes: Vec<Wavenumber> = grid.wavenumbers().collect();
        let band = modes.iter().map(|&k| grid.in_dealias_band(k)).collect();
        let velocity = (0..law.dim)
            .map(|j| modes.iter().map(|&k| law.symbol(k, j, grid.is_nyquist(k))).collect())
            .collect();
        let derivative = (0..law.dim)
            .map(|j| {
                modes
                    .iter()
                    .map(|&k| if grid.is_nyquist(k) { Complex64::default() } else { Complex64::new(0.0, k.get(j) as f64) })
                    .collect()
            })
            .collect();
        Ok(TransportOp { grid, band, velocity, derivative })
    }

    pub fn apply(&self, theta: &SpectralField) -> Result<SpectralField> {
        if theta.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let th: Vec<Complex64> =
            theta.coeffs().iter().zip(&self.band).map(|(c, &b)| if b { *c } else { Complex64::default() }).collect();
        let mut acc = vec![0.0; self.grid.len()];
        for (vel, der) in self.velocity.iter().zip(&self.derivative) {
            let u = SpectralField::from_coeffs_unchecked(self.grid, th.iter().zip(vel).map(|(c, s)| c * s).collect());
            let g = SpectralField::from_coeffs_unchecked(self.grid, th.iter().zip(der).map(|(c, s)| c * s).collect());
            let (u, g) = (to_physical_unchecked(&u), to_physical_unchecked(&g));
            for ((a, x), y) in acc.iter_mut().zip(u.values()).zip(g.values()) {
                *a += x * y;
            }
        }
        if acc.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow("transport term"));
        }
        let mut out = to_spectral_unchecked(&PhysicalField::new_unchecked(self.grid, acc));
        for (c, &b) in out.coeffs_mut().iter_mut().zip(&self.band) {
            if !b {
                *c = Complex64::default();
            }
        }
        Ok(out)
    }
}

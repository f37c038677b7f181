//! Pseudo-spectral simulation and analysis of fractional stochastic active
//! scalar equations on the periodic torus `[0, 2π)^d`:
//!
//! ```text
//! dθ = (−ν (−Δ)^{α/2} θ + u·∇θ) dt + G(θ) dW,     u = R^{γ,σ} θ
//! ```
//!
//! covering the surface quasi-geostrophic equation, the 2D vorticity
//! Navier–Stokes equation, fractional Burgers and nonlocal transport.
//!
//! * [`spectral`]: grid, transforms, Fourier multipliers, Sobolev norms.
//! * [`constitutive`]: velocity laws `θ ↦ u` and the transport term.
//! * [`noise`]: Q-Wiener increments and Nemytskii diffusion operators.
//! * [`integrator`]: exponential-Euler stepping of the mild formulation,
//!   Picard iteration, stopping ladders and ensembles.
//! * [`analysis`]: well-posedness regime oracle, weak-form residuals and
//!   moment diagnostics.

pub mod analysis;
pub mod constitutive;
mod error;
pub mod init;
pub mod integrator;
pub mod noise;
pub mod spectral;

pub use error::{Error, Result};

pub use num_complex::Complex64;

//! Torus discretization, transforms, Fourier multipliers and Sobolev norms.

mod fft;
mod field;
mod grid;
mod ops;

pub use field::{to_physical, to_spectral, PhysicalField, SpectralField, HERMITIAN_TOLERANCE};
pub use grid::{TorusGrid, Wavenumber};
pub use ops::{
    dealias, fractional_laplacian, homogeneous_norm, partial, semigroup_apply, sobolev_norm, stream_function,
    MultiplierOp,
};

pub(crate) use field::{to_physical_unchecked, to_spectral_unchecked};
pub(crate) use ops::{abs_pow, check_alpha, check_gamma, dealias_in_place};

//! Numerical laboratory for maximal Fourier multipliers over fractal
//! dilation sets.
//!
//! * [`dilation`]: dilation sets, dyadic blocks, covering numbers and
//!   dimension estimates.
//! * [`fractional`]: Riemann–Liouville integrals and Marchaud derivatives
//!   on sampled paths.
//! * [`frames`]: smooth dyadic cutoffs, grid functions, Besov, Hölder and
//!   `Σ²` norms.
//! * [`multipliers`]: multiplier families, decay diagnostics and the
//!   fractional-difference transform `m̃`.
//! * [`lab`]: maximal operators, square functionals, H-norms and the
//!   experiment drivers.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`.

pub mod dilation;
pub mod error;
pub mod fractional;
pub mod frames;
pub mod jet;
pub mod lab;
pub mod multipliers;
pub mod numerics;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub type BlockSet64 = dilation::BlockSet<f64>;
pub type DimensionEstimate64 = dilation::DimensionEstimate<f64>;
pub type SampledPath64 = fractional::SampledPath<f64>;
pub type GridFunction64 = frames::GridFunction<f64>;
pub type BesovParams64 = frames::BesovParams<f64>;
pub type Sigma2Report64 = frames::Sigma2Report<f64>;

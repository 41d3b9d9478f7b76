//! Dyadic frames: smooth cutoffs, periodic grid functions, Littlewood–Paley
//! pieces, Besov and Hölder norms, and `Σ²` norms of multipliers.

mod besov;
mod cutoff;
pub(crate) mod grid;
mod sigma2;

pub use besov::{besov_norm, derivative, hoelder_norm, low_piece, lp_piece, BesovNorm, BesovParams};
pub use cutoff::{build_cutoffs, SmoothCutoff, Transition};
pub use grid::{GridFunction, Side};
pub use sigma2::{
    band_function, dilation_invariance_check, sigma2_norm, sigma2_norm_on, sigma2_weighted_sobolev, BandGrid,
    BandNorm, DilationReport, Sigma2Report, BAND_EXTENT, DILATION_CONSTANT, DIVERGENCE_RATIO,
};

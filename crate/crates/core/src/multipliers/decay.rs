use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Multiplier;
use crate::error::{Error, Result};
use crate::numerics::fit_line;

/// Samples per dyadic band for the supremum.
const SAMPLES_PER_BAND: usize = 4096;

/// Decay of `sup_{2^j ≤ |ξ| ≤ 2^{j+1}} |∂^k m|` in `j` for one order `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub order: usize,
    /// Fitted slope of `log₂ sup` against `j`.
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    /// `(j, sup)` for every band.
    pub sups: Vec<(i32, f64)>,
}

/// Fits the band-wise decay exponent of every radial derivative up to
/// `order` over `j_range` (inclusive).
pub fn decay_profile<M: Multiplier + ?Sized>(m: &M, j_range: (i32, i32), order: usize) -> Result<Vec<DecayFit>> {
    let (lo, hi) = j_range;
    if hi <= lo {
        return Err(Error::param("j_range", "needs at least two bands"));
    }
    let bands: Vec<Vec<f64>> = (lo..=hi)
        .into_par_iter()
        .map(|j| {
            let mut sup = vec![0.0f64; order + 1];
            for k in 0..=SAMPLES_PER_BAND {
                let r = 2f64.powf(j as f64 + k as f64 / SAMPLES_PER_BAND as f64);
                for (s, d) in sup.iter_mut().zip(m.radial_derivatives(r, order)) {
                    *s = s.max(d.norm());
                }
            }
            sup
        })
        .collect();
    (0..=order)
        .map(|k| {
            let sups: Vec<(i32, f64)> = (lo..=hi).zip(&bands).map(|(j, s)| (j, s[k])).collect();
            let (x, y): (Vec<f64>, Vec<f64>) = sups
                .iter()
                .filter(|(_, s)| *s > 0.0)
                .map(|(j, s)| (*j as f64, s.log2()))
                .unzip();
            let fit = fit_line(&x, &y).ok_or_else(|| Error::param("m", "too few nonzero bands for a fit"))?;
            Ok(DecayFit {
                order: k,
                slope: fit.slope,
                intercept: fit.intercept,
                residual: fit.residual,
                sups,
            })
        })
        .collect()
}

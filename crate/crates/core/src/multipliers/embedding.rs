use serde::{Deserialize, Serialize};

use super::{MTilde, Multiplier};
use crate::error::{Error, Result};
use crate::frames::{sigma2_norm, BesovParams, SmoothCutoff};

/// Default bound in [`embedding_check`].
pub const EMBEDDING_CONSTANT: f64 = 32.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    /// `‖m̃‖_{Σ²(B_p^s)}`.
    pub mtilde_norm: f64,
    /// `‖m‖_{Σ²(B_p^{s+α+ε})}`.
    pub m_norm: f64,
    /// Their quotient; `0/0` is reported as 0.
    pub ratio: f64,
    pub constant: f64,
    pub pass: bool,
}

/// `‖m̃‖_{Σ²(B_p^s)} / ‖m‖_{Σ²(B_p^{s+α+ε})}` over `j_range`.
#[allow(clippy::too_many_arguments)]
pub fn embedding_check<M: Multiplier + ?Sized>(
    m: &M,
    alpha: f64,
    eps: f64,
    p: f64,
    s: f64,
    j_range: (i32, i32),
    j_max: i32,
    constant: f64,
) -> Result<EmbeddingReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", "must lie in (0, 1)"));
    }
    if !(eps > 0.0) {
        return Err(Error::param("eps", "must be positive"));
    }
    let cut = SmoothCutoff::default();
    let mt = MTilde { inner: m, alpha };
    let mtilde_norm = sigma2_norm(&mt, &BesovParams::new(p, s, j_max)?, j_range, &cut)?.value;
    let m_norm = sigma2_norm(m, &BesovParams::new(p, s + alpha + eps, j_max)?, j_range, &cut)?.value;
    let ratio = if m_norm > 0.0 {
        mtilde_norm / m_norm
    } else if mtilde_norm > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(EmbeddingReport {
        mtilde_norm,
        m_norm,
        ratio,
        constant,
        pass: ratio <= constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multipliers::MultiplierSpec;

    #[test]
    fn zero_multiplier_passes_with_zero() {
        let r = embedding_check(&MultiplierSpec::zero(), 0.3, 0.1, 2.0, 1.0, (-1, 2), 4, EMBEDDING_CONSTANT).unwrap();
        assert_eq!(r.ratio, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn band_bump_is_finite() {
        let r = embedding_check(&MultiplierSpec::band_bump(), 0.3, 0.1, 2.0, 1.0, (-2, 4), 8, EMBEDDING_CONSTANT).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0, "{r:?}");
    }
}

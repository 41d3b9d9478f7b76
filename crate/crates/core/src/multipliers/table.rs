use num_traits::Zero;
use rayon::prelude::*;

use super::Multiplier;
use crate::scalar::Cplx;

/// Uniform table of a radial profile on `[lo, hi]` with four-point cubic
/// interpolation. Used where dense 2-d evaluation of an expensive profile
/// would dominate the cost.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTable {
    lo: f64,
    step: f64,
    values: Vec<Cplx<f64>>,
}

impl RadialTable {
    /// Tabulates `m` at `lo + k·step`, one node past each end so that the
    /// stencil is always complete inside `[lo, hi]`.
    pub fn build<M: Multiplier + ?Sized>(m: &M, lo: f64, hi: f64, step: f64) -> Self {
        let count = ((hi - lo) / step).ceil() as usize + 3;
        let start = lo - step;
        let values = (0..count)
            .into_par_iter()
            .map(|k| m.radial((start + k as f64 * step).max(0.0)))
            .collect();
        RadialTable { lo: start, step, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Interpolated value; `None` outside the tabulated range.
    pub fn get(&self, r: f64) -> Option<Cplx<f64>> {
        let u = (r - self.lo) / self.step;
        if !(u >= 1.0) || u > (self.values.len() - 2) as f64 {
            return None;
        }
        let i = (u.floor() as usize).min(self.values.len() - 3);
        let t = u - i as f64;
        let p = [self.values[i - 1], self.values[i], self.values[i + 1], self.values[i + 2]];
        // Lagrange weights on nodes −1, 0, 1, 2
        let w = [
            -t * (t - 1.0) * (t - 2.0) / 6.0,
            (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0,
            (t + 1.0) * t * (t - 1.0) / 6.0,
        ];
        Some(p.iter().zip(w).fold(Cplx::zero(), |acc, (v, w)| acc + v * w))
    }
}

impl Multiplier for RadialTable {
    /// Zero outside the tabulated range.
    fn radial(&self, r: f64) -> Cplx<f64> {
        self.get(r).unwrap_or_else(Cplx::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multipliers::MultiplierSpec;

    #[test]
    fn cubic_accuracy() {
        let m = MultiplierSpec::oscillatory(0.5, 1.0);
        let t = RadialTable::build(&m, 4.0, 16.0, 2f64.powi(-10));
        for k in 0..500 {
            let r = 4.0 + 12.0 * k as f64 / 499.0;
            assert!((t.radial(r) - m.radial(r)).norm() < 1e-10, "{r}");
        }
        assert!(t.get(3.0).is_none() && t.get(17.0).is_none());
    }
}

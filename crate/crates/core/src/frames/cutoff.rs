//! Smooth radial cutoffs `φ̂` and the dyadic band functions `ψ̂`.

use serde::{Deserialize, Serialize};

use crate::jet::Jet;
use crate::scalar::Real;

/// Glue used on the transition annulus `1 ≤ |ξ| ≤ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transition {
    /// `h(x) = g(x)/(g(x)+g(1−x))` with `g(x) = e^{−1/x}`; `C^∞`.
    #[default]
    SmoothExp,
    /// `h(x) = (1 − cos πx)/2`; only `C^1` at the ends of the annulus.
    RaisedCosine,
}

/// Radial cutoff with `φ̂ = 1` on `|ξ| ≤ 1` and `φ̂ = 0` on `|ξ| ≥ 2`.
///
/// The band function is `ψ̂(ξ) = φ̂(ξ) − φ̂(2ξ)`, supported in
/// `1/2 ≤ |ξ| ≤ 2`, and `ψ̂_j = ψ̂(·/2^j)` telescopes to one on `ξ ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SmoothCutoff {
    pub transition: Transition,
}

/// Builds the cutoff pair for the requested transition.
pub fn build_cutoffs(transition: Transition) -> SmoothCutoff {
    SmoothCutoff { transition }
}

impl SmoothCutoff {
    /// `φ̂` as a function of the radius `r = |ξ|`.
    pub fn phi<T: Real>(&self, r: T) -> T {
        let x = T::of(2.0) - r.abs();
        if x >= T::one() {
            return T::one();
        }
        if x <= T::zero() {
            return T::zero();
        }
        match self.transition {
            Transition::SmoothExp => {
                let a = (-x.recip()).exp();
                let b = (-(T::one() - x).recip()).exp();
                a / (a + b)
            }
            Transition::RaisedCosine => (T::one() - (T::PI() * x).cos()) * T::of(0.5),
        }
    }

    /// `ψ̂(r) = φ̂(r) − φ̂(2r)`.
    pub fn psi<T: Real>(&self, r: T) -> T {
        self.phi(r) - self.phi(r + r)
    }

    /// `ψ̂_j(r) = ψ̂(r/2^j)`.
    pub fn band<T: Real>(&self, r: T, j: i32) -> T {
        self.psi(r * T::of(2f64.powi(-j)))
    }

    /// Taylor jet of `φ̂` in the radial variable.
    pub fn phi_jet<T: Real, const K: usize>(&self, r: Jet<T, K>) -> Jet<T, K> {
        let x = Jet::constant(T::of(2.0)) - r;
        let x0 = x.value();
        if x0 >= T::one() {
            return Jet::constant(T::one());
        }
        if x0 <= T::zero() {
            return Jet::constant(T::zero());
        }
        match self.transition {
            Transition::SmoothExp => {
                let a = (-x.recip()).exp();
                let b = (-(Jet::constant(T::one()) - x).recip()).exp();
                a / (a + b)
            }
            Transition::RaisedCosine => {
                let (_, c) = x.scale(T::PI()).sin_cos();
                (Jet::constant(T::one()) - c).scale(T::of(0.5))
            }
        }
    }

    /// Jet of `ψ̂`.
    pub fn psi_jet<T: Real, const K: usize>(&self, r: Jet<T, K>) -> Jet<T, K> {
        self.phi_jet(r) - self.phi_jet(r.scale(T::of(2.0)))
    }

    /// `Σ_{j=lo}^{hi} ψ̂(r/2^j)`; one for `2^{lo} ≤ r ≤ 2^{hi}`.
    pub fn partition_sum<T: Real>(&self, r: T, lo: i32, hi: i32) -> T {
        (lo..=hi).map(|j| self.band(r, j)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_and_values() {
        for c in [build_cutoffs(Transition::SmoothExp), build_cutoffs(Transition::RaisedCosine)] {
            assert_eq!(c.phi(0.5), 1.0);
            assert_eq!(c.phi(1.0), 1.0);
            assert_eq!(c.phi(3.0), 0.0);
            assert_eq!(c.phi(2.0), 0.0);
            let mut prev = 1.0;
            for k in 0..=400 {
                let r = 0.9 + k as f64 * 1.2 / 400.0;
                let v = c.phi(r);
                assert!((0.0..=1.0).contains(&v) && v <= prev);
                prev = v;
                let p = c.psi(r);
                assert!(p >= 0.0);
            }
            assert_eq!(c.psi(0.49), 0.0);
            assert_eq!(c.psi(2.01), 0.0);
        }
    }

    #[test]
    fn partition_at_sample_point() {
        let c = SmoothCutoff::default();
        assert!((c.partition_sum(1.37f64, -20, 20) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partition_on_log_grid() {
        let c = SmoothCutoff::default();
        for k in 0..=2000 {
            let r = 2f64.powf(-10.0 + 20.0 * k as f64 / 2000.0);
            assert!((c.partition_sum(r, -14, 14) - 1.0).abs() < 1e-12, "{r}");
        }
    }

    #[test]
    fn jet_matches_values_and_differences() {
        let c = SmoothCutoff::default();
        for r in [1.1, 1.5, 1.93] {
            let j = c.phi_jet(Jet::<f64, 3>::variable(r));
            assert!((j.value() - c.phi(r)).abs() < 1e-15);
            let h = 1e-5;
            let fd = (c.phi(r + h) - c.phi(r - h)) / (2.0 * h);
            assert!((j.derivative(1) - fd).abs() < 1e-7);
            let fd2 = (c.phi(r + h) - 2.0 * c.phi(r) + c.phi(r - h)) / (h * h);
            assert!((j.derivative(2) - fd2).abs() < 1e-3);
        }
    }
}

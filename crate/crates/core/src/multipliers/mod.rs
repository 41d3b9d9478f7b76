//! Multiplier families, decay diagnostics and the fractional-difference
//! transform `m̃`.
//!
//! Every built-in family is radial, `m(ξ) = M(|ξ|)`, and is described by its
//! radial profile `M`. Derivatives are taken in the radial variable; in one
//! dimension they are the ordinary derivatives on `ξ > 0`.

mod decay;
mod embedding;
mod mtilde;
mod table;

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::SmoothCutoff;
use crate::jet::{CJet, Jet};
use crate::scalar::{Cplx, Real};

pub use decay::{decay_profile, DecayFit};
pub use embedding::{embedding_check, EmbeddingReport, EMBEDDING_CONSTANT};
pub use mtilde::{mtilde, mtilde_radial, mtilde_radial_tol, MTilde, MTildeGrid, MTildePoint};
pub use table::RadialTable;

/// Highest derivative order available in closed form.
pub const MAX_CLOSED_ORDER: usize = 4;

/// A radial multiplier `m(ξ) = M(|ξ|)`.
pub trait Multiplier: Send + Sync {
    /// `M(r)` for `r = |ξ| ≥ 0`.
    fn radial(&self, r: f64) -> Cplx<f64>;

    /// `[M(r), M'(r), …, M^{(order)}(r)]`.
    fn radial_derivatives(&self, r: f64, order: usize) -> Vec<Cplx<f64>> {
        fd_derivatives(|x| self.radial(x), r, order)
    }

    /// `m(ξ)` at a point of `ℝ^d`.
    fn eval<T: Real>(&self, xi: &[T]) -> Cplx<T>
    where
        Self: Sized,
    {
        let r = xi.iter().map(|x| x.f64() * x.f64()).sum::<f64>().sqrt();
        let v = self.radial(r);
        Cplx::new(T::of(v.re), T::of(v.im))
    }
}

/// Central finite differences for orders up to 4. The step is tied to
/// `min(r, 1)` so oscillations of unit period stay resolved.
pub(crate) fn fd_derivatives(f: impl Fn(f64) -> Cplx<f64>, r: f64, order: usize) -> Vec<Cplx<f64>> {
    let mut out = vec![f(r)];
    for k in 1..=order.min(MAX_CLOSED_ORDER) {
        let h = r.clamp(1e-3, 1.0) * 10f64.powf(-16.0 / (k as f64 + 2.0));
        let v = |i: f64| f(r + i * h);
        let d = match k {
            1 => (v(-2.0) - v(-1.0) * 8.0 + v(1.0) * 8.0 - v(2.0)) / (12.0 * h),
            2 => (-v(-2.0) + v(-1.0) * 16.0 - out[0] * 30.0 + v(1.0) * 16.0 - v(2.0)) / (12.0 * h * h),
            3 => (-v(-2.0) + v(-1.0) * 2.0 - v(1.0) * 2.0 + v(2.0)) / (2.0 * h * h * h),
            _ => (v(-2.0) - v(-1.0) * 4.0 + out[0] * 6.0 - v(1.0) * 4.0 + v(2.0)) / (h * h * h * h),
        };
        out.push(d);
    }
    out.resize(order + 1, Cplx::zero());
    out
}

/// How derivatives of a [`MultiplierSpec`] are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    #[default]
    ClosedForm,
    FiniteDifference,
}

/// User-supplied radial profile.
#[derive(Clone)]
pub struct CustomFn(pub Arc<dyn Fn(f64) -> Cplx<f64> + Send + Sync>);

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomFn(..)")
    }
}

impl PartialEq for CustomFn {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `(1 − φ̂(r)) r^{−a} e^{2πir}`: every derivative decays like `r^{−a}`.
    LimitedDecay { a: f64 },
    /// `(1 − φ̂(r)) r^{−β} cos(r^{1−δ})`.
    SlowDecay { beta: f64, delta: f64 },
    /// `e^{2πi r^α} (1 − φ̂(r)) r^{−β}`.
    Oscillatory { alpha: f64, beta: f64 },
    /// `ψ̂(r)`.
    BandBump,
    /// `m ≡ value`; does not vanish near the origin.
    Constant { value: f64 },
    /// `M(factor·r)`.
    Dilated { factor: f64, inner: Box<MultiplierSpec> },
    /// Arbitrary profile; derivatives by finite differences.
    #[serde(skip)]
    Custom(CustomFn),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub derivative_mode: DerivativeMode,
    #[serde(default)]
    pub cutoff: SmoothCutoff,
}

impl MultiplierSpec {
    pub fn new(family: Family) -> Self {
        MultiplierSpec {
            family,
            derivative_mode: DerivativeMode::ClosedForm,
            cutoff: SmoothCutoff::default(),
        }
    }

    pub fn limited_decay(a: f64) -> Self {
        Self::new(Family::LimitedDecay { a })
    }

    pub fn slow_decay(beta: f64, delta: f64) -> Self {
        Self::new(Family::SlowDecay { beta, delta })
    }

    pub fn oscillatory(alpha: f64, beta: f64) -> Self {
        Self::new(Family::Oscillatory { alpha, beta })
    }

    pub fn band_bump() -> Self {
        Self::new(Family::BandBump)
    }

    pub fn constant(value: f64) -> Self {
        Self::new(Family::Constant { value })
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn custom(f: impl Fn(f64) -> Cplx<f64> + Send + Sync + 'static) -> Self {
        MultiplierSpec {
            derivative_mode: DerivativeMode::FiniteDifference,
            ..Self::new(Family::Custom(CustomFn(Arc::new(f))))
        }
    }

    /// `m(factor·)`.
    pub fn dilated(&self, factor: f64) -> Self {
        MultiplierSpec {
            derivative_mode: self.derivative_mode,
            cutoff: self.cutoff,
            family: Family::Dilated {
                factor,
                inner: Box::new(self.clone()),
            },
        }
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.derivative_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, "must be positive"))
            }
        };
        let unit = |name, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::param(name, "must lie in (0, 1)"))
            }
        };
        match &self.family {
            Family::LimitedDecay { a } => pos("a", *a),
            Family::SlowDecay { beta, delta } => pos("beta", *beta).and(unit("delta", *delta)),
            Family::Oscillatory { alpha, beta } => unit("alpha", *alpha).and(pos("beta", *beta)),
            Family::Constant { value } if !value.is_finite() => Err(Error::param("value", "must be finite")),
            Family::Dilated { factor, inner } => pos("factor", *factor).and(inner.validate()),
            _ => Ok(()),
        }
    }

    /// Whether the profile vanishes for `r ≤ 1/2`.
    pub fn vanishes_near_origin(&self) -> bool {
        match &self.family {
            Family::Constant { value } => *value == 0.0,
            Family::Custom(_) => false,
            Family::Dilated { factor, inner } => *factor <= 1.0 && inner.vanishes_near_origin(),
            _ => true,
        }
    }

    /// Radial jet `M(r + ε)` truncated at order `K − 1`; `None` for custom
    /// profiles.
    pub fn profile_jet<const K: usize>(&self, r: Jet<f64, K>) -> Option<CJet<f64, K>> {
        let zero = CJet::real(Jet::constant(0.0));
        let tail = |r: Jet<f64, K>| -> Option<Jet<f64, K>> {
            // 1 − φ̂ is identically zero on a neighbourhood of r ≤ 1
            if r.value() <= 1.0 {
                None
            } else {
                Some(Jet::constant(1.0) - self.cutoff.phi_jet(r))
            }
        };
        Some(match &self.family {
            Family::LimitedDecay { a } => match tail(r) {
                None => zero,
                Some(t) => CJet::expi(r.scale(std::f64::consts::TAU)).mul(CJet::real(t * r.powf(-a))),
            },
            Family::SlowDecay { beta, delta } => match tail(r) {
                None => zero,
                Some(t) => {
                    let (_, c) = r.powf(1.0 - delta).sin_cos();
                    CJet::real(t * r.powf(-beta) * c)
                }
            },
            Family::Oscillatory { alpha, beta } => match tail(r) {
                None => zero,
                Some(t) => CJet::expi(r.powf(*alpha).scale(std::f64::consts::TAU)).mul(CJet::real(t * r.powf(-beta))),
            },
            Family::BandBump => CJet::real(self.cutoff.psi_jet(r)),
            Family::Constant { value } => CJet::real(Jet::constant(*value)),
            Family::Dilated { factor, inner } => return inner.profile_jet(r.scale(*factor)),
            Family::Custom(_) => return None,
        })
    }

    /// `m(ξ)` for a point given by its coordinates.
    pub fn eval_at<T: Real>(&self, xi: &[T]) -> Cplx<T> {
        Multiplier::eval(self, xi)
    }
}

impl Multiplier for MultiplierSpec {
    fn radial(&self, r: f64) -> Cplx<f64> {
        let r = r.abs();
        let tail = |r: f64| 1.0 - self.cutoff.phi(r);
        match &self.family {
            Family::LimitedDecay { a } => {
                let t = tail(r);
                if t == 0.0 {
                    return Cplx::zero();
                }
                Cplx::from_polar(t * r.powf(-a), std::f64::consts::TAU * (r - r.floor()))
            }
            Family::SlowDecay { beta, delta } => {
                let t = tail(r);
                if t == 0.0 {
                    return Cplx::zero();
                }
                Cplx::new(t * r.powf(-beta) * r.powf(1.0 - delta).cos(), 0.0)
            }
            Family::Oscillatory { alpha, beta } => {
                let t = tail(r);
                if t == 0.0 {
                    return Cplx::zero();
                }
                let ph = r.powf(*alpha);
                Cplx::from_polar(t * r.powf(-beta), std::f64::consts::TAU * (ph - ph.floor()))
            }
            Family::BandBump => Cplx::new(self.cutoff.psi(r), 0.0),
            Family::Constant { value } => Cplx::new(*value, 0.0),
            Family::Dilated { factor, inner } => inner.radial(factor * r),
            Family::Custom(f) => (f.0)(r),
        }
    }

    fn radial_derivatives(&self, r: f64, order: usize) -> Vec<Cplx<f64>> {
        if self.derivative_mode == DerivativeMode::ClosedForm && order <= MAX_CLOSED_ORDER {
            let jet = self.profile_jet::<{ MAX_CLOSED_ORDER + 1 }>(Jet::variable(r.abs()));
            if let Some(j) = jet {
                let mut out: Vec<Cplx<f64>> = (0..=order).map(|k| j.derivative(k)).collect();
                // keep the value bit-identical to `radial`
                out[0] = self.radial(r);
                return out;
            }
        }
        fd_derivatives(|x| self.radial(x), r, order)
    }
}

/// `m(factor·)` for any multiplier.
pub struct Dilation<'a, M: ?Sized> {
    pub inner: &'a M,
    pub factor: f64,
}

impl<M: Multiplier + ?Sized> Multiplier for Dilation<'_, M> {
    fn radial(&self, r: f64) -> Cplx<f64> {
        self.inner.radial(self.factor * r)
    }

    fn radial_derivatives(&self, r: f64, order: usize) -> Vec<Cplx<f64>> {
        let mut d = self.inner.radial_derivatives(self.factor * r, order);
        let mut s = 1.0;
        for v in d.iter_mut() {
            *v *= s;
            s *= self.factor;
        }
        d
    }
}

impl<M: Multiplier + ?Sized> Multiplier for &M {
    fn radial(&self, r: f64) -> Cplx<f64> {
        (**self).radial(r)
    }

    fn radial_derivatives(&self, r: f64, order: usize) -> Vec<Cplx<f64>> {
        (**self).radial_derivatives(r, order)
    }
}

//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar: `f32` or `f64`.
///
/// Everything in the crate is generic over this trait. Special functions are
/// evaluated in double precision and narrowed, so `f32` instantiations get
/// single-precision results with double-precision special-function values.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Sum
    + Default
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`; panics only on NaN-producing targets,
    /// which the supported scalars never are.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable")
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

/// Gamma function evaluated in double precision.
pub fn gamma<T: Real>(x: T) -> T {
    T::of(statrs::function::gamma::gamma(x.f64()))
}

#[cfg(test)]
pub(crate) fn cplx<T: Real>(re: T) -> Cplx<T> {
    Complex::new(re, T::zero())
}

//! Complex samples on a periodic grid `[−L, L)^d`, `d ∈ {1, 2}`.
//!
//! Transform convention: `f̂(ξ) = ∫ f(x) e^{−2πi x·ξ} dx`, so that frequency
//! bin `m` sits at `ξ = m/(2L)` and the Riemann sum gives
//! `f̂_m = h^d (−1)^{|m|} DFT(f)_m` with `h = 2L/N`. Frequency-side samples are
//! stored in FFT order along each axis.

use std::io::{Read, Write};
use std::sync::Arc;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_traits::Zero;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Which representation the samples hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Space,
    Frequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GridFunction<T> {
    pub dim: usize,
    pub n: usize,
    /// Half period `L`.
    pub extent: T,
    pub samples: Vec<Cplx<T>>,
    pub side: Side,
}

impl<T: Real> GridFunction<T> {
    pub fn new(dim: usize, n: usize, extent: T, samples: Vec<Cplx<T>>, side: Side) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::NotPowerOfTwo(n));
        }
        if !(extent > T::zero()) || !extent.is_finite() {
            return Err(Error::param("extent", "must be positive and finite"));
        }
        if samples.len() != n.pow(dim as u32) {
            return Err(Error::Shape(format!(
                "expected {} samples, got {}",
                n.pow(dim as u32),
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(GridFunction {
            dim,
            n,
            extent,
            samples,
            side,
        })
    }

    pub fn zeros(dim: usize, n: usize, extent: T) -> Result<Self> {
        Self::new(dim, n, extent, vec![Cplx::zero(); n.pow(dim as u32)], Side::Space)
    }

    /// Samples `f(x)` in space at `x_k = −L + k h`.
    pub fn from_fn_1d(n: usize, extent: T, f: impl Fn(T) -> Cplx<T>) -> Result<Self> {
        let h = extent * T::of(2.0) / T::of_usize(n);
        let samples = (0..n).map(|k| f(-extent + h * T::of_usize(k))).collect();
        Self::new(1, n, extent, samples, Side::Space)
    }

    /// Samples `f(x, y)` in space, row-major with `y` the slow index.
    pub fn from_fn_2d(n: usize, extent: T, f: impl Fn(T, T) -> Cplx<T>) -> Result<Self> {
        let h = extent * T::of(2.0) / T::of_usize(n);
        let mut samples = Vec::with_capacity(n * n);
        for r in 0..n {
            let y = -extent + h * T::of_usize(r);
            for c in 0..n {
                samples.push(f(-extent + h * T::of_usize(c), y));
            }
        }
        Self::new(2, n, extent, samples, Side::Space)
    }

    /// Grid step `h = 2L/N`.
    pub fn step(&self) -> T {
        self.extent * T::of(2.0) / T::of_usize(self.n)
    }

    /// Frequency spacing `1/(2L)`.
    pub fn frequency_step(&self) -> T {
        (self.extent * T::of(2.0)).recip()
    }

    /// Largest representable `|ξ|` along an axis, `N/(4L)`.
    pub fn nyquist(&self) -> T {
        T::of_usize(self.n) / (self.extent * T::of(4.0))
    }

    /// Space coordinates along one axis.
    pub fn coordinates(&self) -> Vec<T> {
        let h = self.step();
        (0..self.n).map(|k| -self.extent + h * T::of_usize(k)).collect()
    }

    /// Frequencies along one axis in FFT order.
    pub fn frequencies(&self) -> Vec<T> {
        let d = self.frequency_step();
        let n = self.n as i64;
        (0..n)
            .map(|m| {
                let s = if m < n / 2 { m } else { m - n };
                T::of(s as f64) * d
            })
            .collect()
    }

    /// Radius `|ξ|` for every stored frequency sample.
    pub fn frequency_radii(&self) -> Vec<T> {
        let f = self.frequencies();
        match self.dim {
            1 => f.iter().map(|x| x.abs()).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.samples.len());
                for fy in &f {
                    for fx in &f {
                        out.push(fx.hypot(*fy));
                    }
                }
                out
            }
        }
    }

    pub fn to_frequency(&self) -> GridFunction<T> {
        match self.side {
            Side::Frequency => self.clone(),
            Side::Space => {
                let mut data = self.samples.clone();
                fft_nd(&mut data, self.n, self.dim, false);
                let h = self.step().powi(self.dim as i32);
                apply_checkerboard(&mut data, self.n, self.dim, h);
                GridFunction {
                    samples: data,
                    side: Side::Frequency,
                    ..self.clone_header()
                }
            }
        }
    }

    pub fn to_space(&self) -> GridFunction<T> {
        match self.side {
            Side::Space => self.clone(),
            Side::Frequency => {
                let mut data = self.samples.clone();
                let c = self.frequency_step().powi(self.dim as i32);
                apply_checkerboard(&mut data, self.n, self.dim, c);
                fft_nd(&mut data, self.n, self.dim, true);
                GridFunction {
                    samples: data,
                    side: Side::Space,
                    ..self.clone_header()
                }
            }
        }
    }

    pub(crate) fn clone_header(&self) -> GridFunction<T> {
        GridFunction {
            dim: self.dim,
            n: self.n,
            extent: self.extent,
            samples: Vec::new(),
            side: self.side,
        }
    }

    /// Multiplies the spectrum by `m(|ξ|)` and returns the result in space.
    pub fn radial_multiply(&self, m: impl Fn(T) -> Cplx<T>) -> GridFunction<T> {
        let mut f = self.to_frequency();
        for (v, r) in f.samples.iter_mut().zip(self.frequency_radii()) {
            *v = *v * m(r);
        }
        f.to_space()
    }

    /// `L²` norm, Riemann sum on either side (Plancherel on the grid).
    pub fn l2_norm(&self) -> T {
        let w = match self.side {
            Side::Space => self.step(),
            Side::Frequency => self.frequency_step(),
        }
        .powi(self.dim as i32);
        (self.samples.iter().map(|v| v.norm_sqr()).sum::<T>() * w).sqrt()
    }

    /// `L^p` norm of the space-side samples; `p = ∞` gives the grid maximum.
    pub fn lp_norm(&self, p: T) -> T {
        let f = self.to_space();
        lp_of(&f.samples, p, self.step().powi(self.dim as i32))
    }

    pub fn sup_norm(&self) -> T {
        self.to_space().samples.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    /// Little-endian layout: `u32 dim, u64 N, f64 L, u32 side`, then
    /// interleaved `Re, Im` doubles.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_u32::<LittleEndian>(self.dim as u32)?;
        w.write_u64::<LittleEndian>(self.n as u64)?;
        w.write_f64::<LittleEndian>(self.extent.f64())?;
        w.write_u32::<LittleEndian>(match self.side {
            Side::Space => 0,
            Side::Frequency => 1,
        })?;
        for v in &self.samples {
            w.write_f64::<LittleEndian>(v.re.f64())?;
            w.write_f64::<LittleEndian>(v.im.f64())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let dim = r.read_u32::<LittleEndian>()? as usize;
        let n = r.read_u64::<LittleEndian>()? as usize;
        let extent = T::of(r.read_f64::<LittleEndian>()?);
        let side = match r.read_u32::<LittleEndian>()? {
            0 => Side::Space,
            1 => Side::Frequency,
            s => return Err(Error::Parse(format!("unknown side tag {s}"))),
        };
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let len = n
            .checked_pow(dim as u32)
            .filter(|l| *l <= 1 << 28)
            .ok_or_else(|| Error::Parse(format!("grid size {n} too large")))?;
        let mut samples = Vec::with_capacity(len);
        for _ in 0..len {
            let re = r.read_f64::<LittleEndian>()?;
            let im = r.read_f64::<LittleEndian>()?;
            samples.push(Cplx::new(T::of(re), T::of(im)));
        }
        Self::new(dim, n, extent, samples, side)
    }
}

/// Frequency-to-space transform with the plan built once, for loops that
/// invert many spectra on the same grid.
pub(crate) struct InversePlan<T: Real> {
    n: usize,
    dim: usize,
    scale: T,
    fft: Arc<dyn Fft<T>>,
}

impl<T: Real> InversePlan<T> {
    pub(crate) fn new(g: &GridFunction<T>) -> Self {
        InversePlan {
            n: g.n,
            dim: g.dim,
            scale: g.frequency_step().powi(g.dim as i32),
            fft: plan(g.n, true),
        }
    }

    /// Overwrites frequency samples (FFT order) with space samples.
    pub(crate) fn apply(&self, data: &mut [Cplx<T>]) {
        apply_checkerboard(data, self.n, self.dim, self.scale);
        fft_nd_with(&*self.fft, data, self.n, self.dim);
    }
}

pub(crate) fn lp_of<T: Real>(v: &[Cplx<T>], p: T, cell: T) -> T {
    if p.is_infinite() {
        v.iter().fold(T::zero(), |m, x| m.max(x.norm()))
    } else if p == T::of(2.0) {
        (v.iter().map(|x| x.norm_sqr()).sum::<T>() * cell).sqrt()
    } else {
        (v.iter().map(|x| x.norm().powf(p)).sum::<T>() * cell).powf(p.recip())
    }
}

/// Multiplies sample `(m_1, …, m_d)` by `c·(−1)^{m_1+…+m_d}`.
fn apply_checkerboard<T: Real>(data: &mut [Cplx<T>], n: usize, dim: usize, c: T) {
    for (i, v) in data.iter_mut().enumerate() {
        let parity = if dim == 1 { i } else { i / n + i % n };
        *v = if parity % 2 == 0 { *v * c } else { -*v * c };
    }
}

fn plan<T: Real>(n: usize, inverse: bool) -> Arc<dyn Fft<T>> {
    let mut p = FftPlanner::new();
    if inverse {
        p.plan_fft_inverse(n)
    } else {
        p.plan_fft_forward(n)
    }
}

/// Unnormalised forward or inverse DFT along every axis.
fn fft_nd<T: Real>(data: &mut [Cplx<T>], n: usize, dim: usize, inverse: bool) {
    fft_nd_with(&*plan::<T>(n, inverse), data, n, dim);
}

fn fft_nd_with<T: Real>(fft: &dyn Fft<T>, data: &mut [Cplx<T>], n: usize, dim: usize) {
    fft.process(data);
    if dim == 2 {
        transpose(data, n);
        fft.process(data);
        transpose(data, n);
    }
}

fn transpose<T: Copy>(data: &mut [T], n: usize) {
    for r in 0..n {
        for c in r + 1..n {
            data.swap(r * n + c, c * n + r);
        }
    }
}

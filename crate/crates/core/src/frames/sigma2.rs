//! `Σ²(B)` norms `(Σ_j ‖m(2^j·)ψ̂‖_B²)^{1/2}` of multipliers and the
//! weighted-Sobolev comparison.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::besov::{besov_norm, BesovParams};
use super::cutoff::SmoothCutoff;
use super::grid::{GridFunction, Side};
use crate::error::{Error, Result};
use crate::multipliers::{Dilation, Multiplier, RadialTable};
use crate::numerics::integrate_adaptive_from;
use crate::scalar::{Cplx, Real};

/// Default half period of the band grids; bands live in `|ξ| ≤ 2`.
pub const BAND_EXTENT: f64 = 4.0;
/// Default bound in [`dilation_invariance_check`].
pub const DILATION_CONSTANT: f64 = 8.0;
/// Top-end band ratio at or above which the `Σ²` sum is judged divergent.
pub const DIVERGENCE_RATIO: f64 = 0.97;

/// Sampling of the individual band functions `m(2^j·)ψ̂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandGrid {
    pub dim: usize,
    pub extent: f64,
    /// Points per axis; `None` picks `4L·2^{j_max+1}` so the Besov pieces
    /// up to `j_max` fit under the Nyquist limit.
    pub n: Option<usize>,
}

impl Default for BandGrid {
    fn default() -> Self {
        BandGrid {
            dim: 1,
            extent: BAND_EXTENT,
            n: None,
        }
    }
}

impl BandGrid {
    pub fn points(&self, j_max: i32) -> usize {
        self.n
            .unwrap_or_else(|| ((4.0 * self.extent * 2f64.powi(j_max + 1)).ceil() as usize).next_power_of_two())
            .max(64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BandNorm<T> {
    pub j: i32,
    pub norm: T,
    /// The band's own Besov sum was still growing at `j_max`.
    pub stale: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Sigma2Report<T> {
    pub value: T,
    pub bands: Vec<BandNorm<T>>,
    /// The last band carries more than 1% of the squared total.
    pub stale: bool,
    /// Ratio of the last two nonzero band norms at the top of the range.
    pub tail_ratio: Option<T>,
    /// Verdict on the untruncated sum: band norms decay geometrically at
    /// the top end (or vanish there).
    pub finite: bool,
}

impl<T: Real> Sigma2Report<T> {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,band_norm\n");
        for b in &self.bands {
            s.push_str(&format!("{},{:e}\n", b.j, b.norm.f64()));
        }
        s
    }
}

/// Samples `m(2^j ξ) ψ̂(ξ)` on the band grid.
pub fn band_function<T: Real, M: Multiplier + ?Sized>(
    m: &M,
    j: i32,
    cut: &SmoothCutoff,
    grid: &BandGrid,
    n: usize,
) -> Result<GridFunction<T>> {
    let scale = 2f64.powi(j);
    let h = 2.0 * grid.extent / n as f64;
    let eval = |r: f64| -> Cplx<f64> {
        let w = cut.psi(r);
        if w == 0.0 {
            Cplx::zero()
        } else {
            m.radial(scale * r) * w
        }
    };
    let to_t = |v: Cplx<f64>| Cplx::new(T::of(v.re), T::of(v.im));
    match grid.dim {
        1 => {
            // x_{N−k} = −x_k, so only x ≥ 0 is evaluated
            let half: Vec<Cplx<f64>> = (n / 2..n)
                .into_par_iter()
                .map(|k| eval(-grid.extent + k as f64 * h))
                .collect();
            let mut samples = vec![Cplx::zero(); n];
            samples[0] = to_t(eval(grid.extent));
            for (i, v) in half.iter().enumerate() {
                let k = n / 2 + i;
                samples[k] = to_t(*v);
                if k != n / 2 {
                    samples[n - k] = to_t(*v);
                }
            }
            GridFunction::new(1, n, T::of(grid.extent), samples, Side::Space)
        }
        2 => {
            let table = RadialTable::build(&Dilation { inner: m, factor: scale }, 0.5, 2.0, 2f64.powi(-14));
            let samples: Vec<Cplx<T>> = (0..n * n)
                .into_par_iter()
                .map(|i| {
                    let x = -grid.extent + (i % n) as f64 * h;
                    let y = -grid.extent + (i / n) as f64 * h;
                    let r = x.hypot(y);
                    let w = cut.psi(r);
                    if w == 0.0 {
                        Cplx::zero()
                    } else {
                        to_t(table.radial(r) * w)
                    }
                })
                .collect();
            GridFunction::new(2, n, T::of(grid.extent), samples, Side::Space)
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// `(Σ_{j∈j_range} ‖m(2^j·)ψ̂‖_{B_p^s}²)^{1/2}` on the default 1-d band grid.
pub fn sigma2_norm<T: Real, M: Multiplier + ?Sized>(
    m: &M,
    params: &BesovParams<T>,
    j_range: (i32, i32),
    cut: &SmoothCutoff,
) -> Result<Sigma2Report<T>> {
    sigma2_norm_on(m, params, j_range, cut, &BandGrid::default())
}

pub fn sigma2_norm_on<T: Real, M: Multiplier + ?Sized>(
    m: &M,
    params: &BesovParams<T>,
    j_range: (i32, i32),
    cut: &SmoothCutoff,
    grid: &BandGrid,
) -> Result<Sigma2Report<T>> {
    params.validate()?;
    let (lo, hi) = j_range;
    if hi < lo {
        return Err(Error::param("j_range", "empty range"));
    }
    let n = grid.points(params.j_max);
    let bands = (lo..=hi)
        .map(|j| {
            let g = band_function::<T, M>(m, j, cut, grid, n)?;
            if g.samples.iter().all(|v| v.is_zero()) {
                return Ok(BandNorm {
                    j,
                    norm: T::zero(),
                    stale: false,
                });
            }
            let b = besov_norm(&g, params, cut)?;
            Ok(BandNorm {
                j,
                norm: b.value,
                stale: b.stale,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize(bands))
}

fn summarize<T: Real>(bands: Vec<BandNorm<T>>) -> Sigma2Report<T> {
    let total = bands.iter().map(|b| b.norm * b.norm).sum::<T>();
    let last = bands.last().map_or(T::zero(), |b| b.norm * b.norm);
    let nonzero: Vec<T> = bands.iter().map(|b| b.norm).filter(|v| *v > T::zero()).collect();
    let tail_ratio = match nonzero.len() {
        0 | 1 => None,
        k => Some(nonzero[k - 1] / nonzero[k - 2]),
    };
    let top_zero = bands.last().is_some_and(|b| b.norm == T::zero());
    let finite = top_zero || tail_ratio.is_some_and(|r| r < T::of(DIVERGENCE_RATIO));
    Sigma2Report {
        value: total.sqrt(),
        stale: total > T::zero() && last > T::of(0.01) * total,
        bands,
        tail_ratio,
        finite,
    }
}

/// `(Σ_{k≤l} (2π)^{−2k} ∫_{2^{j_min} ≤ |ξ| ≤ 2^{j_max}} |∂^k m(ξ)|² |ξ|^{2k−1} dξ)^{1/2}`
/// in one dimension.
///
/// The `(2π)^{−k}` factors convert `ξ`-derivatives to the frequency units
/// of the Besov pieces, so the result is directly comparable with
/// `sigma2_norm(m, B_2^l)`.
pub fn sigma2_weighted_sobolev<M: Multiplier + ?Sized>(m: &M, l: usize, j_domain: (i32, i32)) -> Result<f64> {
    let (lo, hi) = j_domain;
    if hi <= lo {
        return Err(Error::param("j_domain", "empty annulus"));
    }
    let tau = std::f64::consts::TAU;
    let total: f64 = (lo..hi)
        .into_par_iter()
        .map(|j| {
            let a = 2f64.powi(j);
            let panels = ((a * 4.0).ceil() as usize).clamp(8, 1 << 14);
            let breaks: Vec<f64> = (0..=panels).map(|k| a + a * k as f64 / panels as f64).collect();
            let q = integrate_adaptive_from(
                |r: f64| {
                    let d = m.radial_derivatives(r, l);
                    let mut s = 0.0;
                    for (k, v) in d.iter().enumerate() {
                        s += v.norm_sqr() * r.powi(2 * k as i32 - 1) / tau.powi(2 * k as i32);
                    }
                    Cplx::new(s, 0.0)
                },
                &breaks,
                1e-14,
                1e-10,
                20 * panels,
            );
            // both half-lines
            2.0 * q.value.re
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .sum();
    Ok(total.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DilationReport<T> {
    pub base: T,
    /// `(r, ‖m(r·)‖/‖m‖)` per dilation factor.
    pub ratios: Vec<(f64, T)>,
    pub max_ratio: T,
    pub constant: f64,
    pub pass: bool,
}

/// `max_r ‖m(r·)‖_{Σ²(B)}/‖m‖_{Σ²(B)}` over `r_list`, asserted against
/// `constant`.
pub fn dilation_invariance_check<T: Real, M: Multiplier + ?Sized>(
    m: &M,
    r_list: &[f64],
    params: &BesovParams<T>,
    j_range: (i32, i32),
    cut: &SmoothCutoff,
    constant: f64,
) -> Result<DilationReport<T>> {
    if let Some(r) = r_list.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::param("r", format!("dilation factor {r} must be positive")));
    }
    let base = sigma2_norm(m, params, j_range, cut)?.value;
    let ratios = r_list
        .iter()
        .map(|&r| {
            let v = sigma2_norm(&Dilation { inner: m, factor: r }, params, j_range, cut)?.value;
            let ratio = if base > T::zero() { v / base } else if v > T::zero() { T::infinity() } else { T::one() };
            Ok((r, ratio))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = ratios.iter().fold(T::zero(), |a, (_, v)| a.max(*v));
    Ok(DilationReport {
        base,
        ratios,
        max_ratio,
        constant,
        pass: max_ratio <= T::of(constant),
    })
}

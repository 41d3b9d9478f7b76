//! Dilated multiplier operators, their maximal function over a dilation set
//! and the square functional that dominates it.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::weights::HWeights;
use crate::dilation::DilationSet;
use crate::error::{Error, Result};
use crate::fractional::marchaud_weights;
use crate::frames::grid::InversePlan;
use crate::frames::{GridFunction, Side};
use crate::multipliers::Multiplier;
use crate::scalar::{Cplx, Real};

type C64 = Complex<f64>;

/// Hölder exponent declared for the paths `t ↦ T_{m(t·)}f(x)`: every
/// built-in family is smooth in `t > 0`.
pub const PATH_HOELDER: f64 = 1.0;

/// `T_{m(t·)} f`, the inverse transform of `m(tξ) f̂(ξ)`.
pub fn apply_dilated_multiplier<T: Real, M: Multiplier + ?Sized>(
    f: &GridFunction<T>,
    m: &M,
    t: T,
) -> Result<GridFunction<T>> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(Error::param("t", "must be positive"));
    }
    let t = t.f64();
    Ok(f.radial_multiply(|r| {
        let v = m.radial(t * r.f64());
        Cplx::new(T::of(v.re), T::of(v.im))
    }))
}

/// `t ∈ E ∩ [2^{j_lo}, 2^{j_hi+1}]` with at most `depth` materialized points
/// per block; the ends of every analytic tail are included.
pub fn dilation_times(set: &DilationSet, depth: usize, j_range: (i32, i32)) -> Result<Vec<f64>> {
    if depth == 0 {
        return Err(Error::param("sampling_depth", "must be positive"));
    }
    let set = set.clone().with_cap(depth);
    let mut t = Vec::new();
    for j in j_range.0..=j_range.1 {
        let b = set.rescaled_block::<f64>(j)?;
        let scale = 2f64.powi(j);
        t.extend(b.points.iter().map(|p| p * scale));
        for tail in &b.tails {
            t.push(tail.lo() * scale);
            t.push(tail.hi() * scale);
        }
    }
    t.sort_by(f64::total_cmp);
    t.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * b.abs());
    t.retain(|x| *x > 0.0);
    if t.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(t)
}

/// Maximal function at one sampling depth and its change from half the depth.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalOutput<T> {
    /// `sup_t |T_{m(t·)}f|` (real, nonnegative samples).
    pub function: GridFunction<T>,
    pub times: usize,
    /// `‖M_d − M_{d/2}‖₂ / ‖M_d‖₂`; `None` at depth 1.
    pub increment: Option<f64>,
}

/// `sup_{t} |T_{m(t·)} f|` over the given times.
pub fn sup_over_times<T: Real, M: Multiplier + ?Sized>(f: &GridFunction<T>, m: &M, times: &[f64]) -> GridFunction<T> {
    let spec = f.to_frequency();
    let radii: Vec<f64> = f.frequency_radii().iter().map(|r| r.f64()).collect();
    let plan = InversePlan::new(&spec);
    let len = spec.samples.len();
    let sup = times
        .par_iter()
        .fold(
            || (vec![T::zero(); len], vec![Cplx::<T>::new(T::zero(), T::zero()); len]),
            |(mut acc, mut buf), t| {
                for ((b, v), r) in buf.iter_mut().zip(&spec.samples).zip(&radii) {
                    let w = m.radial(t * r);
                    *b = *v * Cplx::new(T::of(w.re), T::of(w.im));
                }
                plan.apply(&mut buf);
                for (a, b) in acc.iter_mut().zip(&buf) {
                    *a = a.max(b.norm());
                }
                (acc, buf)
            },
        )
        .map(|(acc, _)| acc)
        .reduce(
            || vec![T::zero(); len],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = x.max(y);
                }
                a
            },
        );
    real_grid(f, sup)
}

fn real_grid<T: Real>(template: &GridFunction<T>, v: Vec<T>) -> GridFunction<T> {
    GridFunction {
        samples: v.into_iter().map(|x| Cplx::new(x, T::zero())).collect(),
        side: Side::Space,
        ..template.clone_header()
    }
}

/// `M_m^E f = sup_{t∈E} |T_{m(t·)}f|` over the materialization of `E` with
/// `sampling_depth` points per block in `j_range`.
pub fn maximal_function<T: Real, M: Multiplier + ?Sized>(
    f: &GridFunction<T>,
    m: &M,
    set: &DilationSet,
    sampling_depth: usize,
    j_range: (i32, i32),
) -> Result<MaximalOutput<T>> {
    let times = dilation_times(set, sampling_depth, j_range)?;
    let function = sup_over_times(f, m, &times);
    let increment = if sampling_depth >= 2 {
        let coarse = sup_over_times(f, m, &dilation_times(set, sampling_depth / 2, j_range)?);
        let diff: f64 = function
            .samples
            .iter()
            .zip(&coarse.samples)
            .map(|(a, b)| (a.re - b.re).f64().powi(2))
            .sum();
        let norm: f64 = function.samples.iter().map(|a| a.re.f64().powi(2)).sum();
        Some(if norm > 0.0 { (diff / norm).sqrt() } else { 0.0 })
    } else {
        None
    };
    Ok(MaximalOutput {
        function,
        times: times.len(),
        increment,
    })
}

/// Per-pixel square functional and the size of the path grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareFunctional {
    /// `Σ_j ∫_1^2 d(s,Ẽ_j)^{−1+2β} |D^α F_j(s)|² ds` (real samples).
    pub function: GridFunction<f64>,
    pub path_nodes: usize,
    /// Pixels whose value came out non-finite.
    pub flagged: Vec<usize>,
}

/// `F(t)` on the whole grid for every `t`, pixel-major.
fn sample_paths<M: Multiplier + ?Sized>(f: &GridFunction<f64>, m: &M, t: &[f64]) -> Vec<Vec<C64>> {
    let spec = f.to_frequency();
    let radii = f.frequency_radii();
    let plan = InversePlan::new(&spec);
    let columns: Vec<Vec<C64>> = t
        .par_iter()
        .map(|t| {
            let mut buf: Vec<C64> = spec
                .samples
                .iter()
                .zip(&radii)
                .map(|(v, r)| v * m.radial(t * r))
                .collect();
            plan.apply(&mut buf);
            buf
        })
        .collect();
    let pixels = spec.samples.len();
    (0..pixels)
        .into_par_iter()
        .map(|p| columns.iter().map(|c| c[p]).collect())
        .collect()
}

/// `Σ_j ∫_1^2 d(s,Ẽ_j)^{−1+2β} |D^α F_j(s)|² ds` per pixel, where
/// `F(t) = T_{m(t·)}f(x)` and `F_j(s) = F(2^j s)`, using
/// `D^α F_j(s) = 2^{jα} (D^α F)(2^j s)` on the shared `t`-grid of `w`.
pub fn square_functional<M: Multiplier + ?Sized>(
    f: &GridFunction<f64>,
    m: &M,
    alpha: f64,
    w: &HWeights,
) -> Result<SquareFunctional> {
    if !(alpha > w.beta && alpha <= 0.5) {
        return Err(Error::param("alpha", "need beta < alpha <= 1/2"));
    }
    let (t, index) = w.t_grid();
    let mut rows: Vec<usize> = index.iter().flatten().copied().collect();
    rows.sort_unstable();
    rows.dedup();
    let dense = marchaud_weights(&t, alpha, PATH_HOELDER, &rows)?;
    // rows only reach their own node
    let ops: Vec<Vec<f64>> = dense
        .into_iter()
        .zip(&rows)
        .map(|(mut r, &i)| {
            r.truncate(i + 1);
            r
        })
        .collect();
    let slot = |i: usize| rows.binary_search(&i).expect("row of a block node");
    let block_terms: Vec<(f64, Vec<(usize, f64)>)> = w
        .blocks
        .iter()
        .zip(&index)
        .map(|(b, ix)| {
            let scale = 2f64.powf(2.0 * b.j as f64 * alpha);
            (scale, ix.iter().map(|&i| slot(i)).zip(b.weights.iter().copied()).collect())
        })
        .collect();

    let paths = sample_paths(f, m, &t);
    let values: Vec<f64> = paths
        .par_iter()
        .map(|path| {
            let d: Vec<C64> = ops
                .iter()
                .map(|row| row.iter().zip(path).fold(C64::new(0.0, 0.0), |acc, (w, v)| acc + v * *w))
                .collect();
            block_terms
                .iter()
                .map(|(scale, terms)| scale * terms.iter().map(|(k, wk)| wk * d[*k].norm_sqr()).sum::<f64>())
                .sum()
        })
        .collect();
    let flagged = values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_finite())
        .map(|(i, _)| i)
        .collect();
    Ok(SquareFunctional {
        function: real_grid(f, values),
        path_nodes: t.len(),
        flagged,
    })
}

/// Coarse summary of a sample of positive ratios on a log₂ scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// Lower bin edges (`log₂` of the ratio).
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn log2(values: &[f64], bins: usize) -> Histogram {
        let logs: Vec<f64> = values.iter().filter(|v| **v > 0.0 && v.is_finite()).map(|v| v.log2()).collect();
        if logs.is_empty() || bins == 0 {
            return Histogram {
                edges: Vec::new(),
                counts: Vec::new(),
            };
        }
        let lo = logs.iter().copied().fold(f64::INFINITY, f64::min).floor();
        let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max).floor() + 1.0;
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0; bins];
        for l in logs {
            let k = (((l - lo) / width) as usize).min(bins - 1);
            counts[k] += 1;
        }
        Histogram {
            edges: (0..bins).map(|k| lo + width * k as f64).collect(),
            counts,
        }
    }
}

use serde::{Deserialize, Serialize};

use super::block::BlockSet;
use super::measure::{distance_integral, entropy_number};
use super::sequence::SequenceRule;
use super::DilationSet;
use crate::error::{Error, Result};
use crate::numerics::fit_line;
use crate::scalar::Real;

/// Ratio of successive dyadic-block sums below which a series is judged
/// convergent. The verdict for `Σ (t_n − t_{n+1})^e` with `t_n = n^{-p}`
/// flips at `e* = (1 − log2 ρ)/(1 + p)`, within 0.05 of `1/(1+p)`.
pub const CONVERGENCE_RATIO: f64 = 0.97;

/// Default constant for the two-sided dimension bound.
pub const BOUND_CONSTANT: f64 = 10.0;

/// `δ_k = c·10^{-k/2}`, `k = 2..=12`, with `c = (√5 − 1)/2` so that no
/// `1/δ_k` is rational and dyadic points never sit on cell boundaries.
pub fn default_delta_schedule() -> Vec<f64> {
    let c = (5f64.sqrt() - 1.0) / 2.0;
    (2..=12).map(|k| c * 10f64.powf(-k as f64 / 2.0)).collect()
}

/// Number of trailing schedule points used in slope fits.
const FIT_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    EntropySlope,
    GapSum,
    DistanceIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DimensionEstimate<T> {
    pub value: T,
    pub method: EstimateMethod,
    /// `(δ_min, δ_max)` of the points entering the fit.
    pub delta_range: (T, T),
    pub residual: T,
}

fn check_schedule<T: Real>(schedule: &[T]) -> Result<()> {
    if schedule.len() < FIT_POINTS {
        return Err(Error::param("delta_schedule", "needs at least 4 values"));
    }
    if schedule.iter().any(|d| !(*d > T::zero() && *d <= T::one())) {
        return Err(Error::param("delta_schedule", "values must lie in (0, 1]"));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::param("delta_schedule", "must be strictly decreasing"));
    }
    Ok(())
}

fn slope_estimate<T: Real>(schedule: &[T], log_n: &[f64]) -> Result<DimensionEstimate<T>> {
    let k = schedule.len() - FIT_POINTS;
    let x: Vec<f64> = schedule[k..].iter().map(|d| -d.f64().ln()).collect();
    let fit = fit_line(&x, &log_n[k..])
        .ok_or_else(|| Error::param("delta_schedule", "degenerate fit"))?;
    Ok(DimensionEstimate {
        value: T::of(fit.slope.clamp(0.0, 1.0)),
        method: EstimateMethod::EntropySlope,
        delta_range: (schedule[schedule.len() - 1], schedule[k]),
        residual: T::of(fit.residual),
    })
}

/// Box-counting dimension of one block: slope of `log N(B,δ)` against
/// `−log δ` over the last four schedule points.
pub fn minkowski_dimension<T: Real>(b: &BlockSet<T>, schedule: &[T]) -> Result<DimensionEstimate<T>> {
    check_schedule(schedule)?;
    if b.is_empty() {
        return Err(Error::EmptyBlock);
    }
    let log_n = schedule
        .iter()
        .map(|d| entropy_number(b, *d).map(|n| (n as f64).ln()))
        .collect::<Result<Vec<_>>>()?;
    slope_estimate(schedule, &log_n)
}

/// `κ(E)`: slope of `sup_j log N(E_j,δ)` against `−log δ` over the last four
/// schedule points, with `j` ranging over `j_range` (inclusive).
pub fn kappa<T: Real>(
    set: &DilationSet,
    schedule: &[T],
    j_range: (i32, i32),
) -> Result<DimensionEstimate<T>> {
    check_schedule(schedule)?;
    let blocks: Vec<BlockSet<T>> = (j_range.0..=j_range.1)
        .map(|j| set.rescaled_block(j))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|b| !b.is_empty())
        .collect();
    if blocks.is_empty() {
        return Err(Error::AllBlocksEmpty);
    }
    let mut log_n = Vec::with_capacity(schedule.len());
    for d in schedule {
        let mut best = 0u64;
        for b in &blocks {
            best = best.max(entropy_number(b, *d)?);
        }
        log_n.push((best as f64).ln());
    }
    slope_estimate(schedule, &log_n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSumReport {
    /// `(N, Σ_{n<N+1} (t_n − t_{n+1})^a)` at `N = 2^k`.
    pub checkpoints: Vec<(u64, f64)>,
    /// Ratio of the last two dyadic-block sums.
    pub block_ratio: f64,
    pub convergent: bool,
}

fn sequence_of(set: &DilationSet) -> Result<SequenceRule> {
    let (rule, _) = set
        .generator
        .as_sequence()
        .ok_or_else(|| Error::param("generator", "a sequence generator is required"))?;
    rule.validate()?;
    Ok(rule)
}

/// Partial sums of `Σ (t_n − t_{n+1})^a` at dyadic checkpoints up to
/// `n_max`, with a ratio-test verdict on the last two dyadic blocks.
pub fn gap_sum(set: &DilationSet, a: f64, n_max: u64) -> Result<GapSumReport> {
    if !(a > 0.0) {
        return Err(Error::param("a", "must be positive"));
    }
    let rule = sequence_of(set)?;
    let last = match rule.len() {
        Some(len) => n_max.min(len.saturating_sub(1)),
        None => n_max,
    };
    let mut checkpoints = Vec::new();
    let mut blocks = Vec::new();
    let mut total = 0.0;
    let mut block = 0.0;
    let mut next = 1u64;
    for n in 1..=last {
        let g = rule.gap(n);
        if g < 0.0 {
            return Err(Error::NotMonotone { index: n as usize + 1 });
        }
        let v = g.powf(a);
        total += v;
        block += v;
        if n == next {
            checkpoints.push((n, total));
            blocks.push(block);
            block = 0.0;
            next *= 2;
        }
    }
    if checkpoints.last().map(|c| c.0) != Some(last) && last > 0 {
        checkpoints.push((last, total));
    }
    let finite = rule.len().is_some();
    let block_ratio = match blocks.len() {
        n if n >= 3 && blocks[n - 2] > 0.0 => blocks[n - 1] / blocks[n - 2],
        _ => 0.0,
    };
    Ok(GapSumReport {
        checkpoints,
        block_ratio,
        convergent: finite || block_ratio < CONVERGENCE_RATIO,
    })
}

/// Exponent at which the [`gap_sum`] verdict flips, located by bisection.
pub fn gap_sum_critical_exponent(set: &DilationSet, n_max: u64) -> Result<DimensionEstimate<f64>> {
    let (mut lo, mut hi) = (1e-3, 1.0);
    if gap_sum(set, lo, n_max)?.convergent {
        hi = lo;
    } else if !gap_sum(set, hi, n_max)?.convergent {
        lo = hi;
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if gap_sum(set, mid, n_max)?.convergent {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(DimensionEstimate {
        value: 0.5 * (lo + hi),
        method: EstimateMethod::GapSum,
        delta_range: (1.0 / n_max as f64, 1.0),
        residual: hi - lo,
    })
}

/// Critical exponent of the distance integral: the least `a ∈ (0,1)` at
/// which `sup_j ∫_1^2 d(t,E_j)^{-1+a} dt` over `j_range` is finite, located
/// by bisection. No `δ` enters, so `delta_range` holds the final bracket
/// of `a` and `residual` its width.
pub fn distance_integral_exponent(set: &DilationSet, j_range: (i32, i32)) -> Result<DimensionEstimate<f64>> {
    let blocks: Vec<BlockSet<f64>> = (j_range.0..=j_range.1)
        .map(|j| set.rescaled_block(j))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|b| !b.is_empty())
        .collect();
    if blocks.is_empty() {
        return Err(Error::AllBlocksEmpty);
    }
    let finite = |a: f64| -> Result<bool> {
        for b in &blocks {
            if !distance_integral(b, a)?.value.is_finite() {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let (mut lo, mut hi) = (1e-3, 1.0 - 1e-3);
    if finite(lo)? {
        hi = lo;
    } else if !finite(hi)? {
        lo = hi;
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if finite(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(DimensionEstimate {
        value: 0.5 * (lo + hi),
        method: EstimateMethod::DistanceIntegral,
        delta_range: (lo, hi),
        residual: hi - lo,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorentzReport {
    /// `sup_δ δ^r·#{n : t_n ≥ δ}`, `+∞` once a count saturates.
    pub bound: f64,
    pub verdict: bool,
    /// `(δ, count, δ^r·count)`; the count is `None` when saturated.
    pub rows: Vec<(f64, Option<u64>, f64)>,
}

/// `sup_δ δ^r #{n : t_n ≥ δ}` over the schedule. The verdict holds when no
/// count saturates and the sup over the last decade of `δ` moves the
/// running sup by less than 10%.
pub fn lorentz_membership(set: &DilationSet, r: f64, schedule: &[f64]) -> Result<LorentzReport> {
    if !(r > 0.0) {
        return Err(Error::param("r", "must be positive"));
    }
    check_schedule(schedule)?;
    let rule = sequence_of(set)?;
    let mut rows = Vec::with_capacity(schedule.len());
    for &d in schedule {
        let count = rule.count_at_least(d);
        let v = match count {
            Some(c) => d.powf(r) * c as f64,
            None => f64::INFINITY,
        };
        rows.push((d, count, v));
    }
    let bound = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let d_min = schedule[schedule.len() - 1];
    let early = rows
        .iter()
        .filter(|row| row.0 >= 10.0 * d_min)
        .map(|row| row.2)
        .fold(0.0, f64::max);
    let verdict = bound.is_finite() && (bound - early) <= 0.1 * bound;
    Ok(LorentzReport { bound, verdict, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub a: f64,
    /// `sup_δ δ^a N(B,δ)`.
    pub lhs: f64,
    /// `∫_1^2 d(t,B)^{-1+a} dt`.
    pub mid: f64,
    /// `1 + ∫_0^1 λ^a N(B,λ) dλ/λ`.
    pub rhs: f64,
    /// `lhs/mid`, `None` when both are infinite.
    pub ratio_lhs_mid: Option<f64>,
    pub ratio_mid_rhs: Option<f64>,
    pub constant: f64,
    pub pass: bool,
}

fn ext_ratio(x: f64, y: f64) -> Option<f64> {
    match (x.is_infinite(), y.is_infinite()) {
        (true, true) => None,
        (false, true) => Some(0.0),
        (true, false) => Some(f64::INFINITY),
        _ if y == 0.0 => Some(if x == 0.0 { 0.0 } else { f64::INFINITY }),
        _ => Some(x / y),
    }
}

/// Octaves `λ = 2^{-k}` used for `∫_0^1 λ^a N(λ) dλ/λ`.
const RHS_OCTAVES: i32 = 28;

/// `1 + ∫_0^1 λ^a N(B,λ) dλ/λ` by the trapezoid rule in `log λ` over
/// octaves, with a geometric remainder (infinite if the last octave ratios
/// reach [`CONVERGENCE_RATIO`]).
fn rhs_integral<T: Real>(b: &BlockSet<T>, a: f64) -> Result<f64> {
    let mut vals = Vec::with_capacity(RHS_OCTAVES as usize + 1);
    for k in 0..=RHS_OCTAVES {
        let lam = 2f64.powi(-k);
        vals.push(lam.powf(a) * entropy_number(b, T::of(lam))? as f64);
    }
    let ln2 = std::f64::consts::LN_2;
    let mut s = 0.0;
    for w in vals.windows(2) {
        s += 0.5 * (w[0] + w[1]) * ln2;
    }
    let n = vals.len();
    let ratios: Vec<f64> = (n - 4..n).map(|i| vals[i] / vals[i - 1]).collect();
    let rho = ratios.iter().product::<f64>().powf(0.25);
    if rho >= CONVERGENCE_RATIO {
        return Ok(f64::INFINITY);
    }
    // Σ_{k>K} v_K ρ^{k−K} ln 2
    s += vals[n - 1] * rho / (1.0 - rho) * ln2;
    Ok(1.0 + s)
}

/// Two-sided check `sup δ^a N ≤ C ∫ d^{-1+a}` and `∫ d^{-1+a} ≤ C (1 + ∫ λ^a N dλ/λ)`,
/// in extended reals.
pub fn dimension_bound_check<T: Real>(
    b: &BlockSet<T>,
    a: f64,
    schedule: &[T],
    constant: f64,
) -> Result<BoundCheck> {
    check_schedule(schedule)?;
    let mid = distance_integral(b, T::of(a))?.value.f64();
    let mut lhs = 0.0f64;
    for d in schedule {
        lhs = lhs.max(d.f64().powf(a) * entropy_number(b, *d)? as f64);
    }
    let rhs = rhs_integral(b, a)?;
    let pass = lhs <= constant * mid && mid <= constant * rhs;
    Ok(BoundCheck {
        a,
        lhs,
        mid,
        rhs,
        ratio_lhs_mid: ext_ratio(lhs, mid),
        ratio_mid_rhs: ext_ratio(mid, rhs),
        constant,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::geometric_schedule;

    fn default_schedule() -> Vec<f64> {
        default_delta_schedule()
    }

    #[test]
    fn kappa_of_harmonic_sequence() {
        let est = kappa(&DilationSet::power_sequence(1.0), &default_schedule(), (-4, 4)).unwrap();
        assert!((est.value - 0.5).abs() < 0.05, "{est:?}");
    }

    #[test]
    fn kappa_of_lacunary_is_zero() {
        let est = kappa(&DilationSet::lacunary(), &default_schedule(), (-4, 4)).unwrap();
        assert!(est.value.abs() < 1e-12);
    }

    #[test]
    fn kappa_needs_nonempty_blocks() {
        let s = DilationSet::explicit(vec![100.0]);
        assert_eq!(
            kappa::<f64>(&s, &default_schedule(), (0, 2)).unwrap_err(),
            Error::AllBlocksEmpty
        );
    }

    #[test]
    fn cantor_dimension() {
        let b: BlockSet<f64> = DilationSet::middle_third_cantor(12).rescaled_block(0).unwrap();
        let sched: Vec<f64> = (1..=12).map(|k| 3f64.powi(-k)).collect();
        let est = minkowski_dimension(&b, &sched).unwrap();
        let oracle = 2f64.ln() / 3f64.ln();
        assert!((est.value - oracle).abs() < 0.03, "{est:?}");
        // every aligned count is 5·2^{k-1}: each pair of level-k intervals
        // touches its two cells, the gap cell between them and one
        // neighbour on either side
        for k in 1..=12 {
            assert_eq!(entropy_number(&b, sched[k - 1]).unwrap(), 5 << (k - 1));
        }
        // unaligned scales oscillate log-periodically, so fit across the
        // whole range, kept two levels above the construction depth
        let geo = geometric_schedule(0.1, 3f64.powi(-10), 40);
        let x: Vec<f64> = geo.iter().map(|d| -d.ln()).collect();
        let y: Vec<f64> = geo
            .iter()
            .map(|d| (entropy_number(&b, *d).unwrap() as f64).ln())
            .collect();
        let fit = crate::numerics::fit_line(&x, &y).unwrap();
        assert!((fit.slope - oracle).abs() < 0.05, "{fit:?}");
    }

    #[test]
    fn two_points_have_dimension_zero() {
        let b = BlockSet::<f64>::from_points(0, &[1.25, 1.75]);
        let est = minkowski_dimension(&b, &default_schedule()).unwrap();
        assert!(est.value.abs() < 1e-12);
    }

    #[test]
    fn gap_sum_examples() {
        let s = DilationSet::sequence(SequenceRule::Power { exponent: 1.0 }, 0.0);
        assert!(gap_sum(&s, 0.6, 1 << 20).unwrap().convergent);
        assert!(!gap_sum(&s, 0.5, 1 << 20).unwrap().convergent);
        let g = DilationSet::sequence(SequenceRule::Geometric { ratio: 0.5 }, 0.0);
        for a in [0.01, 0.2, 1.0] {
            assert!(gap_sum(&g, a, 1 << 12).unwrap().convergent);
        }
    }

    #[test]
    fn gap_sum_rejects_non_monotone() {
        let s = DilationSet::sequence(
            SequenceRule::Explicit {
                values: vec![1.0, 0.5, 0.6],
            },
            0.0,
        );
        assert!(matches!(gap_sum(&s, 0.5, 10), Err(Error::NotMonotone { .. })));
        assert!(gap_sum(&DilationSet::lacunary(), 0.5, 10).is_err());
    }

    #[test]
    fn lorentz_examples() {
        let sched: Vec<f64> = (0..=48).map(|k| 10f64.powf(-k as f64 / 4.0)).collect();
        let r = 0.7;
        let s = DilationSet::sequence(SequenceRule::Power { exponent: 1.0 / r }, 0.0);
        let rep = lorentz_membership(&s, r, &sched).unwrap();
        assert!(rep.verdict && rep.bound <= 1.0 + 1e-9, "{}", rep.bound);
        let g = DilationSet::sequence(SequenceRule::Geometric { ratio: 0.5 }, 0.0);
        assert!(lorentz_membership(&g, 0.1, &sched).unwrap().verdict);
        let l = DilationSet::sequence(SequenceRule::InverseLog, 0.0);
        let rep = lorentz_membership(&l, 1.0, &sched).unwrap();
        assert!(!rep.verdict && rep.bound.is_infinite());
    }

    #[test]
    fn distance_integral_exponent_of_power_sequences() {
        for a in [1.0, 2.0] {
            let est = distance_integral_exponent(&DilationSet::power_sequence(a), (-2, 2)).unwrap();
            assert!((est.value - 1.0 / (1.0 + a)).abs() < 0.05, "a={a}: {est:?}");
        }
        let finite = distance_integral_exponent(&DilationSet::explicit(vec![1.2, 1.7]), (0, 0)).unwrap();
        assert!(finite.value < 1e-2);
    }

    #[test]
    fn bound_check_examples() {
        let sched: Vec<f64> = (0..=24).map(|k| 10f64.powf(-k as f64 / 4.0)).collect();
        let two = BlockSet::<f64>::from_points(0, &[1.0, 2.0]);
        let rep = dimension_bound_check(&two, 0.5, &sched, BOUND_CONSTANT).unwrap();
        assert!(rep.pass, "{rep:?}");
        // δ = 1: the cells k = 0, 1, 2 all meet {1, 2}
        assert!(rep.lhs >= 3.0);
        let one = BlockSet::<f64>::from_points(0, &[1.5]);
        let rep = dimension_bound_check(&one, 0.5, &sched, BOUND_CONSTANT).unwrap();
        assert!(rep.pass && rep.mid.is_finite() && rep.rhs.is_finite());
        let c: BlockSet<f64> = DilationSet::middle_third_cantor(10).rescaled_block(0).unwrap();
        let rep = dimension_bound_check(&c, 0.7, &sched, BOUND_CONSTANT).unwrap();
        assert!(rep.pass && rep.mid.is_finite() && rep.rhs.is_finite(), "{rep:?}");
    }
}

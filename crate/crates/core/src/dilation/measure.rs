use serde::{Deserialize, Serialize};

use super::block::{BlockSet, Tail};
use super::estimate::CONVERGENCE_RATIO;
use crate::error::{Error, Result};
use crate::numerics::gauss_legendre;
use crate::scalar::Real;

/// Relative tolerance for deciding that a point sits on a cell boundary.
const BOUNDARY_TOL: f64 = 1e-12;
/// Partial sums above this are reported as divergent.
const DIVERGENCE_CUTOFF: f64 = 1e12;

fn cell_range(x: f64, delta: f64) -> (i64, i64) {
    let u = x / delta;
    let tol = BOUNDARY_TOL * u.abs().max(1.0);
    ((u - 1.0 - tol).ceil() as i64, (u + tol).floor() as i64)
}

/// Cells `k` with `[kδ,(k+1)δ]` meeting the points of a tail.
fn tail_cells(t: &Tail, delta: f64, out: &mut Vec<(i64, i64)>) {
    let mut n = t.n_start;
    loop {
        let x = t.point(n);
        if t.n_end == Some(n) {
            out.push(cell_range(x, delta));
            return;
        }
        if t.gap(n) < delta {
            // gaps only shrink from here on, so the rest is δ-dense
            let lo = t.lo();
            let k_lo = match t.n_end {
                Some(_) => cell_range(lo, delta).0,
                None => {
                    let u = lo / delta;
                    (u + BOUNDARY_TOL * u.abs().max(1.0)).floor() as i64
                }
            };
            out.push((k_lo, cell_range(x, delta).1));
            return;
        }
        out.push(cell_range(x, delta));
        n += 1;
    }
}

/// `N(B,δ)`: the number of `k ∈ ℤ` with `B ∩ [kδ,(k+1)δ] ≠ ∅`. A point on a
/// shared boundary counts for both cells.
pub fn entropy_number<T: Real>(b: &BlockSet<T>, delta: T) -> Result<u64> {
    let delta = delta.f64();
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::param("delta", "must be positive"));
    }
    let mut ranges: Vec<(i64, i64)> = b.points.iter().map(|p| cell_range(p.f64(), delta)).collect();
    for t in &b.tails {
        tail_cells(t, delta, &mut ranges);
    }
    if !b.tails.is_empty() {
        ranges.sort_unstable();
    }
    let mut count = 0u64;
    let mut cur: Option<(i64, i64)> = None;
    for (lo, hi) in ranges {
        match cur {
            Some((clo, chi)) if lo <= chi + 1 => cur = Some((clo, chi.max(hi))),
            Some((clo, chi)) => {
                count += (chi - clo + 1) as u64;
                cur = Some((lo, hi));
            }
            None => cur = Some((lo, hi)),
        }
    }
    if let Some((clo, chi)) = cur {
        count += (chi - clo + 1) as u64;
    }
    Ok(count)
}

/// `d(s,B) = inf_{r∈B} |s − r|`, exact (tails included through their
/// closed-form inverse).
pub fn distance_to_set<T: Real>(s: T, b: &BlockSet<T>) -> Result<T> {
    if b.is_empty() {
        return Err(Error::EmptyBlock);
    }
    let x = s.f64();
    let mut best = f64::INFINITY;
    if !b.points.is_empty() {
        let i = b.points.partition_point(|p| p.f64() < x);
        if i < b.points.len() {
            best = best.min(b.points[i].f64() - x);
        }
        if i > 0 {
            best = best.min(x - b.points[i - 1].f64());
        }
    }
    for t in &b.tails {
        best = best.min(tail_distance(t, x));
    }
    Ok(T::of(best))
}

fn tail_distance(t: &Tail, x: f64) -> f64 {
    let (lo, hi) = (t.lo(), t.hi());
    if x >= hi {
        return x - hi;
    }
    if x <= lo {
        return lo - x;
    }
    match t.first_at_most(x) {
        Some(n) => {
            let below = x - t.point(n);
            if n > t.n_start {
                below.min(t.point(n - 1) - x)
            } else {
                below
            }
        }
        // between the accumulation point and every tail point
        None => x - lo,
    }
}

/// `∫_1^2 d(t,B)^{-1+a} dt` split into its materialized part and the
/// analytic tail contribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DistanceIntegral<T> {
    /// Total, `+∞` when divergence is detected.
    pub value: T,
    /// Exact closed-form contribution of the materialized points.
    pub materialized: T,
    /// Contribution of the tails (`+∞` if divergent).
    pub tail: T,
    pub tail_finite: bool,
}

/// Gap decomposition of `∫_1^2 d(t,B)^{-1+a} dt`: an interior gap `g`
/// contributes `2(g/2)^a/a` and a boundary segment `h` contributes `h^a/a`.
pub fn distance_integral<T: Real>(b: &BlockSet<T>, a: T) -> Result<DistanceIntegral<T>> {
    let a = a.f64();
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::param("a", "must lie in (0, 1)"));
    }
    if b.is_empty() {
        return Err(Error::EmptyBlock);
    }
    // Closed pieces of the set: points and tail hulls, sorted by left end.
    let mut pieces: Vec<(f64, f64)> = b.points.iter().map(|p| (p.f64(), p.f64())).collect();
    pieces.extend(b.tails.iter().map(|t| (t.lo(), t.hi())));
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0));

    let interior = |g: f64| 2.0 * (0.5 * g).powf(a) / a;
    let boundary = |h: f64| h.powf(a) / a;
    let mut total = 0.0;
    total += boundary((pieces[0].0 - 1.0).max(0.0));
    let mut reach = pieces[0].1;
    for &(lo, hi) in &pieces[1..] {
        if lo > reach {
            total += interior(lo - reach);
        }
        reach = reach.max(hi);
    }
    total += boundary((2.0 - reach).max(0.0));

    let mut tail = 0.0;
    let mut tail_finite = true;
    for t in &b.tails {
        match tail_gap_sum(t, a) {
            Some(v) => tail += v,
            None => {
                tail_finite = false;
                tail = f64::INFINITY;
            }
        }
    }
    let mut value = total + tail;
    if value > DIVERGENCE_CUTOFF {
        value = f64::INFINITY;
    }
    Ok(DistanceIntegral {
        value: T::of(value),
        materialized: T::of(total),
        tail: T::of(tail),
        tail_finite: tail_finite && value.is_finite(),
    })
}

/// Blocks of consecutive indices shorter than this are summed term by term.
const DIRECT_BLOCK: u64 = 4096;

/// `Σ_{n=lo}^{hi-1} f(n)` for a smooth positive summand: term by term for
/// short ranges, midpoint-corrected Gauss–Legendre otherwise.
pub(crate) fn smooth_index_sum(f: &dyn Fn(f64) -> f64, lo: u64, hi: u64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if hi - lo <= DIRECT_BLOCK {
        return (lo..hi).map(|n| f(n as f64)).sum();
    }
    // the sum over n ∈ [lo, hi) is the integral over [lo−½, hi−½] up to O(f'')
    let (x, w) = gauss_legendre(48);
    let (a, b) = (lo as f64 - 0.5, hi as f64 - 0.5);
    // integrate in log n, where the summands are power-like
    let (la, lb) = (a.ln(), b.ln());
    let half = 0.5 * (lb - la);
    let mid = 0.5 * (lb + la);
    x.iter()
        .zip(&w)
        .map(|(xi, wi)| {
            let n = (mid + half * xi).exp();
            wi * half * n * f(n)
        })
        .sum()
}

/// Geometric extrapolation of tail sums starts no earlier than this index.
const MIN_EXTRAPOLATION_INDEX: u64 = 1 << 16;

/// `Σ_n 2(g_n/2)^a/a` over the gaps inside a tail; `None` when the series is
/// judged divergent.
fn tail_gap_sum(t: &Tail, a: f64) -> Option<f64> {
    let term = |n: f64| 2.0 * (0.5 * t.rule.gap_at(n) * t.scale).powf(a) / a;
    let end = t.n_end;
    let mut total = 0.0;
    let mut lo = t.n_start;
    let mut prev_block: Option<(f64, f64)> = None;
    let mut settled = 0;
    loop {
        let mut hi = lo.saturating_mul(2);
        if let Some(e) = end {
            // gaps n..n+1 with n+1 ≤ end
            hi = hi.min(e);
        }
        let block = smooth_index_sum(&term, lo, hi);
        total += block;
        if total > DIVERGENCE_CUTOFF {
            return None;
        }
        if end.is_some_and(|e| hi >= e) {
            return Some(total);
        }
        if block <= 1e-17 * total {
            return Some(total);
        }
        if let Some((pb, prho)) = prev_block {
            let rho = block / pb;
            // extrapolate once the block ratios have settled to a geometric rate
            if rho < CONVERGENCE_RATIO && lo >= MIN_EXTRAPOLATION_INDEX && (rho - prho).abs() <= 1e-4 {
                settled += 1;
                if settled >= 2 {
                    return Some(total + block * rho / (1.0 - rho));
                }
            } else {
                settled = 0;
            }
            prev_block = Some((block, rho));
        } else {
            prev_block = Some((block, f64::NAN));
        }
        lo = hi;
        if lo >= super::INDEX_LIMIT {
            return None;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{DilationSet, SequenceRule};
    use super::*;

    fn block(pts: &[f64]) -> BlockSet<f64> {
        BlockSet::from_points(0, pts)
    }

    #[test]
    fn distance_examples() {
        let b = block(&[1.0, 2.0]);
        assert_eq!(distance_to_set(1.5, &b).unwrap(), 0.5);
        assert_eq!(distance_to_set(1.0, &b).unwrap(), 0.0);
        let b = block(&[1.0, 1.25, 2.0]);
        assert!((distance_to_set(1.3, &b).unwrap() - 0.05).abs() < 1e-15);
        let empty = block(&[]);
        assert_eq!(distance_to_set(1.3, &empty), Err(Error::EmptyBlock));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_number(&block(&[1.0]), 0.3).unwrap(), 1);
        // cells [0.5k, 0.5(k+1)] for k = 1, 2 meet 1; k = 3, 4 meet 2
        assert_eq!(entropy_number(&block(&[1.0, 2.0]), 0.5).unwrap(), 4);
        assert!(entropy_number(&block(&[1.0]), 0.0).is_err());
    }

    /// Brute-force covering count: scan every candidate cell.
    fn brute_entropy(pts: &[f64], delta: f64) -> u64 {
        let lo = (pts[0] / delta).floor() as i64 - 2;
        let hi = (pts[pts.len() - 1] / delta).ceil() as i64 + 2;
        (lo..=hi)
            .filter(|k| {
                let (a, b) = (*k as f64 * delta, (*k + 1) as f64 * delta);
                pts.iter()
                    .any(|p| *p >= a - 1e-12 * p.abs() && *p <= b + 1e-12 * p.abs())
            })
            .count() as u64
    }

    #[test]
    fn cantor_entropy_matches_brute_force() {
        for level in 1..=6u32 {
            let b: BlockSet<f64> = DilationSet::middle_third_cantor(level).rescaled_block(0).unwrap();
            let pts = b.points_f64();
            let delta = 3f64.powi(-(level as i32));
            assert_eq!(entropy_number(&b, delta).unwrap(), brute_entropy(&pts, delta));
        }
        // level 2 at δ = 1/9: eight endpoints touch every cell from k=8 to k=18
        // except the two wholly inside removed gaps
        let b: BlockSet<f64> = DilationSet::middle_third_cantor(2).rescaled_block(0).unwrap();
        assert_eq!(entropy_number(&b, 1.0 / 9.0).unwrap(), 10);
    }

    #[test]
    fn tail_entropy_matches_full_materialization() {
        let full: BlockSet<f64> = DilationSet::power_sequence(1.0).rescaled_block(0).unwrap();
        // cap forces an early tail; counts must agree with the dense block
        let short: BlockSet<f64> = DilationSet::power_sequence(1.0)
            .with_cap(50)
            .rescaled_block(0)
            .unwrap();
        for delta in [0.1, 0.01, 1e-3, 1e-4, 3.3e-5] {
            assert_eq!(
                entropy_number(&full, delta).unwrap(),
                entropy_number(&short, delta).unwrap(),
                "delta = {delta}"
            );
        }
    }

    #[test]
    fn tail_distance_matches_points() {
        let short: BlockSet<f64> = DilationSet::power_sequence(1.0)
            .with_cap(20)
            .rescaled_block(0)
            .unwrap();
        let pts: Vec<f64> = (1..100_000).map(|n| 1.0 + 1.0 / n as f64).collect();
        for s in [1.0001, 1.0123, 1.03, 1.049, 1.2, 1.7] {
            let exact = pts
                .iter()
                .map(|p| (p - s).abs())
                .fold(f64::INFINITY, f64::min)
                .min(s - 1.0);
            let d = distance_to_set(s, &short).unwrap();
            assert!((d - exact).abs() < 1e-12, "s = {s}: {d} vs {exact}");
        }
    }

    #[test]
    fn distance_integral_two_points() {
        let b = block(&[1.0, 2.0]);
        let v = distance_integral(&b, 0.5).unwrap().value;
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let v = distance_integral(&b, 1.0 - 1e-9).unwrap().value;
        assert!((v - 1.0).abs() < 1e-6);
        assert!(distance_integral(&b, 1.0).is_err());
    }

    /// Midpoint quadrature of ∫ d(t)^{-1+a} after the substitution
    /// t = c ± w^{1/a} on each half-gap.
    fn quadrature_oracle(pts: &[f64], a: f64) -> f64 {
        let mut edges = vec![1.0];
        edges.extend_from_slice(pts);
        edges.push(2.0);
        let mut total = 0.0;
        for w in edges.windows(2) {
            let (l, r) = (w[0], w[1]);
            let n = 20_000;
            let h = (r - l) / n as f64;
            for i in 0..n {
                let t = l + (i as f64 + 0.5) * h;
                let d = pts.iter().map(|p| (p - t).abs()).fold(f64::INFINITY, f64::min);
                total += d.powf(a - 1.0) * h;
            }
        }
        total
    }

    #[test]
    fn distance_integral_matches_quadrature() {
        // a = 0.9 keeps the endpoint singularity mild enough for a midpoint rule
        let pts = [1.1, 1.35, 1.4, 1.8];
        let exact = distance_integral(&block(&pts), 0.9).unwrap().value;
        let approx = quadrature_oracle(&pts, 0.9);
        assert!((exact - approx).abs() < 2e-3 * exact, "{exact} vs {approx}");
    }

    #[test]
    fn harmonic_block_integral_threshold() {
        let b: BlockSet<f64> = DilationSet::power_sequence(1.0).rescaled_block(0).unwrap();
        let fin = distance_integral(&b, 0.6).unwrap();
        assert!(fin.value.is_finite() && fin.tail_finite);
        let div = distance_integral(&b, 0.4).unwrap();
        assert!(div.value.is_infinite() && !div.tail_finite);
    }

    #[test]
    fn harmonic_tail_sum_matches_direct_sum() {
        // oracle: direct sum of 2(g_n/2)^a/a over the first 10^7 gaps plus an
        // integral remainder for n^{-2a}
        let a = 0.8;
        let short: BlockSet<f64> = DilationSet::power_sequence(1.0)
            .with_cap(1)
            .rescaled_block(0)
            .unwrap();
        let got = distance_integral(&short, a).unwrap();
        let mut direct = 0.0;
        let n_max = 10_000_000u64;
        for n in 1..n_max {
            let g = 1.0 / (n as f64 * (n as f64 + 1.0));
            direct += 2.0 * (g / 2.0).powf(a) / a;
        }
        let x = n_max as f64 - 0.5;
        direct += 2.0 * 0.5f64.powf(a) / a * x.powf(1.0 - 2.0 * a) / (2.0 * a - 1.0);
        // boundary segment from the largest point 2 to 2 is empty
        assert!((got.value - direct).abs() < 1e-6 * direct, "{} vs {}", got.value, direct);
    }

    #[test]
    fn geometric_sequence_integral_is_finite() {
        let s = DilationSet::sequence(SequenceRule::Geometric { ratio: 0.5 }, 1.0);
        let b: BlockSet<f64> = s.rescaled_block(0).unwrap();
        for a in [0.05, 0.3, 0.9] {
            assert!(distance_integral(&b, a).unwrap().value.is_finite());
        }
    }
}

use serde::{Deserialize, Serialize};

use super::sequence::SequenceRule;
use super::{Generator, DEDUP_TOL, GAP_FLOOR};
use crate::scalar::Real;

/// The un-materialized end of a sequence inside a block: the points
/// `scale·(offset + t_n)` for `n_start ≤ n ≤ n_end` (`n_end = None` means
/// the sequence accumulates at `scale·offset`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tail {
    pub rule: SequenceRule,
    pub offset: f64,
    pub scale: f64,
    pub n_start: u64,
    pub n_end: Option<u64>,
}

impl Tail {
    pub fn point(&self, n: u64) -> f64 {
        (self.offset + self.rule.term(n)) * self.scale
    }

    /// Distance between the points `n` and `n + 1`.
    pub fn gap(&self, n: u64) -> f64 {
        self.rule.gap(n) * self.scale
    }

    pub fn hi(&self) -> f64 {
        self.point(self.n_start)
    }

    /// Lowest point of the closure.
    pub fn lo(&self) -> f64 {
        match self.n_end {
            Some(n) => self.point(n),
            None => self.offset * self.scale,
        }
    }

    /// Smallest index `n ≥ n_start` whose point is `≤ x`, if any within range.
    pub fn first_at_most(&self, x: f64) -> Option<u64> {
        let n = self
            .rule
            .first_at_most(x / self.scale - self.offset)?
            .max(self.n_start);
        match self.n_end {
            Some(end) if n > end => None,
            _ => Some(n),
        }
    }
}

/// `(2^{-j}E) ∩ [1,2]`, sorted, with an optional analytic tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BlockSet<T> {
    pub j: i32,
    pub points: Vec<T>,
    /// Whether 1 and 2 belong to the block.
    pub includes_endpoints: (bool, bool),
    /// Set when part of the block is held in `tails` or the cap was hit.
    pub truncated: bool,
    #[serde(default)]
    pub tails: Vec<Tail>,
}

impl<T: Real> BlockSet<T> {
    /// A block holding exactly the given points of `[1,2]`.
    pub fn from_points(j: i32, pts: &[f64]) -> Self {
        let mut v: Vec<f64> = pts
            .iter()
            .copied()
            .filter(|p| (1.0..=2.0).contains(p))
            .collect();
        finish(j, &mut v, Vec::new(), false)
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.tails.is_empty()
    }

    pub fn points_f64(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.f64()).collect()
    }

    /// Write one point per row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("point\n");
        for p in &self.points {
            s.push_str(&format!("{}\n", p.f64()));
        }
        s
    }

    /// The block translated by `shift` (points may leave `[1,2]`; used for
    /// translation checks of covering numbers only).
    pub fn shifted(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for p in out.points.iter_mut() {
            *p = T::of(p.f64() + shift);
        }
        for t in out.tails.iter_mut() {
            t.offset += shift / t.scale;
        }
        out
    }
}

fn finish<T: Real>(j: i32, v: &mut Vec<f64>, tails: Vec<Tail>, truncated: bool) -> BlockSet<T> {
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup_by(|a, b| (*a - *b).abs() <= DEDUP_TOL);
    let has = |x: f64| v.iter().any(|p| (p - x).abs() <= DEDUP_TOL);
    let mut points: Vec<T> = v.iter().map(|p| T::of(*p)).collect();
    // narrower scalars can merge neighbours
    points.dedup();
    BlockSet {
        j,
        includes_endpoints: (has(1.0), has(2.0)),
        truncated: truncated || !tails.is_empty(),
        points,
        tails,
    }
}

/// Snap values within rounding of the block ends and keep those in `[1,2]`.
fn clip(x: f64) -> Option<f64> {
    const EPS: f64 = 1e-12;
    if (1.0 - EPS..1.0).contains(&x) {
        Some(1.0)
    } else if x > 2.0 && x <= 2.0 + EPS {
        Some(2.0)
    } else if (1.0..=2.0).contains(&x) {
        Some(x)
    } else {
        None
    }
}

pub(super) fn materialize<T: Real>(gen: &Generator, j: i32, cap: usize) -> BlockSet<T> {
    let mut pts = Vec::new();
    let mut tails = Vec::new();
    let mut truncated = false;
    collect(gen, j, cap, &mut pts, &mut tails, &mut truncated);
    finish(j, &mut pts, tails, truncated)
}

fn collect(
    gen: &Generator,
    j: i32,
    cap: usize,
    pts: &mut Vec<f64>,
    tails: &mut Vec<Tail>,
    truncated: &mut bool,
) {
    let scale = 2f64.powi(-j);
    match gen {
        Generator::PowerSequence { .. } | Generator::Sequence { .. } => {
            let (rule, offset) = gen.as_sequence().expect("sequence generator");
            sequence_block(&rule, offset, j, cap, pts, tails, truncated);
        }
        Generator::ExplicitPoints { points } => {
            pts.extend(points.iter().filter_map(|p| clip(p * scale)));
        }
        Generator::CantorLike {
            base,
            digits,
            levels,
        } => {
            let denom = (*base as f64).powi(*levels as i32);
            for k in cantor_endpoints(*base as u64, digits, *levels) {
                if let Some(x) = clip((1.0 + k as f64 / denom) * scale) {
                    pts.push(x);
                }
            }
        }
        Generator::LacunaryGrid => {
            pts.push(1.0);
            pts.push(2.0);
        }
        Generator::Union { parts } => {
            for p in parts {
                collect(p, j, cap, pts, tails, truncated);
            }
        }
    }
}

/// Integer numerators `k` (over `base^levels`) of all level interval
/// endpoints, sorted and unique.
pub(crate) fn cantor_endpoints(base: u64, digits: &[u32], levels: u32) -> Vec<u64> {
    let mut lefts = vec![0u64];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(lefts.len() * digits.len());
        for l in &lefts {
            for d in digits {
                next.push(l * base + *d as u64);
            }
        }
        lefts = next;
    }
    let mut all: Vec<u64> = lefts.iter().flat_map(|l| [*l, l + 1]).collect();
    all.sort_unstable();
    all.dedup();
    all
}

fn sequence_block(
    rule: &SequenceRule,
    offset: f64,
    j: i32,
    cap: usize,
    pts: &mut Vec<f64>,
    tails: &mut Vec<Tail>,
    truncated: &mut bool,
) {
    let scale = 2f64.powi(-j);
    let lower = 2f64.powi(j) - offset;
    let upper = 2f64.powi(j + 1) - offset;
    // Indices with t_n ≤ upper, allowing for rounding at the block edge.
    let Some(mut n) = rule.first_at_most(upper * (1.0 + 1e-12)) else {
        return;
    };
    let n_end = if lower <= 0.0 {
        rule.len()
    } else {
        match rule.count_at_least(lower * (1.0 - 1e-12)) {
            Some(c) => Some(c),
            None => None,
        }
    };
    if let Some(end) = n_end {
        if n > end {
            return;
        }
    }
    let mut count = 0usize;
    loop {
        if let Some(x) = clip((offset + rule.term(n)) * scale) {
            pts.push(x);
            count += 1;
        }
        if n_end == Some(n) {
            return;
        }
        if count >= cap || rule.gap(n) * scale < GAP_FLOOR {
            if count >= cap {
                *truncated = true;
            }
            tails.push(Tail {
                rule: rule.clone(),
                offset,
                scale,
                n_start: n + 1,
                n_end,
            });
            return;
        }
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::super::DilationSet;
    use super::*;

    #[test]
    fn lacunary_block_is_endpoints() {
        let b: BlockSet<f64> = DilationSet::lacunary().rescaled_block(0).unwrap();
        assert_eq!(b.points, vec![1.0, 2.0]);
        assert_eq!(b.includes_endpoints, (true, true));
        assert!(!b.truncated);
    }

    #[test]
    fn harmonic_block_starts_with_expected_points() {
        let b: BlockSet<f64> = DilationSet::power_sequence(1.0).rescaled_block(0).unwrap();
        let n = b.points.len();
        assert_eq!(b.points[n - 1], 2.0);
        assert_eq!(b.points[n - 2], 1.5);
        assert!((b.points[n - 3] - 4.0 / 3.0).abs() < 1e-15);
        assert!(b.truncated);
        assert_eq!(b.tails.len(), 1);
        assert_eq!(b.tails[0].lo(), 1.0);
        // the tail starts where the materialized part stops
        let t = &b.tails[0];
        assert!(t.hi() < b.points[0]);
        assert!(t.gap(t.n_start - 1) < GAP_FLOOR);
    }

    #[test]
    fn other_blocks_of_power_sequence_are_empty() {
        let s = DilationSet::power_sequence(1.0);
        // the point 2 = 1 + 1/1 reappears as 1 in block j = 1
        let b: BlockSet<f64> = s.rescaled_block(1).unwrap();
        assert_eq!(b.points, vec![1.0]);
        assert!(b.tails.is_empty());
        for j in [-3, -1, 2, 5] {
            let b: BlockSet<f64> = s.rescaled_block(j).unwrap();
            assert!(b.is_empty(), "j = {j}");
        }
    }

    #[test]
    fn cap_truncates_and_flags() {
        let s = DilationSet::power_sequence(1.0).with_cap(10);
        let b: BlockSet<f64> = s.rescaled_block(0).unwrap();
        assert_eq!(b.points.len(), 10);
        assert!(b.truncated);
        assert_eq!(b.tails[0].n_start, 11);
    }

    #[test]
    fn cantor_level_two_endpoints() {
        // brute-force enumeration of the ternary codes of length 2
        let mut oracle = Vec::new();
        for d1 in [0.0, 2.0] {
            for d2 in [0.0, 2.0] {
                let left: f64 = d1 / 3.0 + d2 / 9.0;
                oracle.push(1.0 + left);
                oracle.push(1.0 + left + 1.0 / 9.0);
            }
        }
        oracle.sort_by(f64::total_cmp);
        let b: BlockSet<f64> = DilationSet::middle_third_cantor(2).rescaled_block(0).unwrap();
        assert_eq!(b.points.len(), 8);
        for (p, q) in b.points.iter().zip(&oracle) {
            assert!((p - q).abs() < 1e-15);
        }
    }

    #[test]
    fn explicit_points_rescale() {
        let s = DilationSet::explicit(vec![3.0, 5.0, 0.75]);
        let b: BlockSet<f64> = s.rescaled_block(1).unwrap();
        assert_eq!(b.points, vec![1.5]);
        let b: BlockSet<f64> = s.rescaled_block(-1).unwrap();
        assert_eq!(b.points, vec![1.5]);
        let b: BlockSet<f64> = s.rescaled_block(2).unwrap();
        assert_eq!(b.points, vec![1.25]);
    }

    #[test]
    fn offset_sequence_spreads_over_blocks() {
        // t_n = 2^{-n} with offset 0 has one point in each block j ≤ -1
        let s = DilationSet::sequence(SequenceRule::Geometric { ratio: 0.5 }, 0.0);
        let b: BlockSet<f64> = s.rescaled_block(-3).unwrap();
        assert_eq!(b.points, vec![1.0, 2.0]);
    }

    #[test]
    fn union_merges_and_dedups() {
        let s = DilationSet::union(vec![DilationSet::power_sequence(1.0), DilationSet::lacunary()]);
        let b: BlockSet<f32> = s.rescaled_block(0).unwrap();
        assert_eq!(b.points[0], 1.0);
        assert_eq!(*b.points.last().unwrap(), 2.0);
        assert!(b.points.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn empty_union_is_rejected() {
        let s = DilationSet::new(Generator::Union { parts: vec![] });
        assert!(s.rescaled_block::<f64>(0).is_err());
    }
}

//! Quadrature for the weighted integrals `∫_1^2 d(s,Ẽ_j)^{−1+2β} G(s) ds`.

use serde::{Deserialize, Serialize};

use crate::dilation::{distance_integral, BlockSet, DilationSet};
use crate::error::{Error, Result};
use crate::fractional::cell_weights;

/// Node spacing of the `s`- and `t`-grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathResolution {
    /// Largest spacing in `t = 2^j s`.
    pub dt: f64,
    /// Largest spacing in `s`.
    pub ds: f64,
    /// Geometric nodes placed toward each end of a half gap longer than `ds`.
    pub grade_levels: u32,
}

impl Default for PathResolution {
    fn default() -> Self {
        PathResolution {
            dt: 1.0 / 32.0,
            ds: 1.0 / 32.0,
            grade_levels: 3,
        }
    }
}

impl PathResolution {
    /// Halved spacings and one more grading level.
    pub fn refined(&self) -> Self {
        PathResolution {
            dt: 0.5 * self.dt,
            ds: 0.5 * self.ds,
            grade_levels: self.grade_levels + 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param("dt", "must be positive"));
        }
        if !(self.ds > 0.0 && self.ds <= 0.5) {
            return Err(Error::param("ds", "must lie in (0, 1/2]"));
        }
        Ok(())
    }

    /// Uniform `s`-spacing for block `j`: `t`-spacing at most `dt`.
    fn block_spacing(&self, j: i32) -> f64 {
        self.ds.min(self.dt * 2f64.powi(-j))
    }
}

/// Nodes `s_k ∈ [1,2]` and weights `w_k` with
/// `Σ w_k G(s_k) ≈ ∫_1^2 d(s,Ẽ_j)^{−1+2β} G(s) ds` for piecewise linear `G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HBlock {
    pub j: i32,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Closed-form `∫_1^2 d(s,Ẽ_j)^{−1+2β} ds`.
    pub exact: f64,
}

impl HBlock {
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Weights of the H-norm over a window of dyadic blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HWeights {
    pub beta: f64,
    pub j_range: (i32, i32),
    pub resolution: PathResolution,
    /// One entry per `j` in `j_range`; empty blocks have no nodes.
    pub blocks: Vec<HBlock>,
}

/// A closed piece of the block (a point or a tail hull) and the weight mass
/// of the gaps hidden inside it.
struct Piece {
    lo: f64,
    hi: f64,
    mass: f64,
}

fn pieces(b: &BlockSet<f64>, a: f64) -> Result<Vec<Piece>> {
    let mut raw: Vec<Piece> = b
        .points
        .iter()
        .map(|p| Piece {
            lo: *p,
            hi: *p,
            mass: 0.0,
        })
        .collect();
    for t in &b.tails {
        let alone = BlockSet {
            j: b.j,
            points: Vec::new(),
            includes_endpoints: (false, false),
            truncated: true,
            tails: vec![t.clone()],
        };
        let d = distance_integral(&alone, a)?;
        if !d.tail_finite {
            return Err(Error::param("beta", "weight integral diverges: beta must exceed kappa/2"));
        }
        raw.push(Piece {
            lo: t.lo(),
            hi: t.hi(),
            mass: d.tail,
        });
    }
    raw.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    let mut out: Vec<Piece> = Vec::with_capacity(raw.len());
    for p in raw {
        match out.last_mut() {
            Some(q) if p.lo <= q.hi => {
                q.hi = q.hi.max(p.hi);
                q.mass += p.mass;
            }
            _ => out.push(p),
        }
    }
    Ok(out)
}

/// A stretch of `[1,2]` free of the set, with the set on the given sides.
struct Gap {
    lo: f64,
    hi: f64,
    left: bool,
    right: bool,
}

impl Gap {
    fn distance(&self, s: f64) -> f64 {
        match (self.left, self.right) {
            (true, true) => (s - self.lo).min(self.hi - s),
            (true, false) => s - self.lo,
            _ => self.hi - s,
        }
        .max(0.0)
    }
}

fn gaps(ps: &[Piece]) -> Vec<Gap> {
    let mut out = Vec::with_capacity(ps.len() + 1);
    let mut push = |lo: f64, hi: f64, left: bool, right: bool| {
        if hi > lo {
            out.push(Gap { lo, hi, left, right });
        }
    };
    push(1.0, ps[0].lo, false, true);
    for w in ps.windows(2) {
        push(w[0].hi, w[1].lo, true, true);
    }
    push(ps[ps.len() - 1].hi, 2.0, true, false);
    out
}

fn push_unique(v: &mut Vec<f64>) {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-14);
}

impl HBlock {
    /// Product-integration weights on a grid refined toward the set.
    pub fn build(b: &BlockSet<f64>, beta: f64, ds: f64, grade_levels: u32) -> Result<HBlock> {
        if !(beta > 0.0 && beta < 0.5) {
            return Err(Error::param("beta", "must lie in (0, 1/2)"));
        }
        if b.is_empty() {
            return Ok(HBlock {
                j: b.j,
                nodes: Vec::new(),
                weights: Vec::new(),
                exact: 0.0,
            });
        }
        let a = 2.0 * beta;
        let exact = distance_integral(b, a)?;
        if !exact.tail_finite || !exact.value.is_finite() {
            return Err(Error::param("beta", "weight integral diverges: beta must exceed kappa/2"));
        }
        let ps = pieces(b, a)?;
        let gs = gaps(&ps);

        let n = (1.0 / ds).ceil() as usize;
        let mut nodes: Vec<f64> = (0..=n).map(|k| 1.0 + k as f64 / n as f64).collect();
        for p in &ps {
            nodes.push(p.lo);
            nodes.push(p.hi);
        }
        for g in &gs {
            let (lo, hi) = (g.lo, g.hi);
            let mid = 0.5 * (lo + hi);
            if g.left && g.right {
                nodes.push(mid);
            }
            let half = if g.left && g.right { 0.5 * (hi - lo) } else { hi - lo };
            if half > ds {
                for k in 1..=grade_levels {
                    let off = half * 0.5f64.powi(k as i32);
                    if g.left {
                        nodes.push(lo + off);
                    }
                    if g.right {
                        nodes.push(hi - off);
                    }
                }
            }
        }
        nodes.retain(|s| (1.0..=2.0).contains(s));
        push_unique(&mut nodes);

        let mut weights = vec![0.0; nodes.len()];
        let mut gi = 0;
        for k in 0..nodes.len() - 1 {
            let (x0, x1) = (nodes[k], nodes[k + 1]);
            let mid = 0.5 * (x0 + x1);
            while gi < gs.len() && gs[gi].hi <= mid {
                gi += 1;
            }
            let Some(g) = gs.get(gi).filter(|g| g.lo <= mid) else {
                // inside a piece
                continue;
            };
            let (u0, u1) = (g.distance(x0), g.distance(x1));
            let (far, near) = cell_weights(u0.min(u1), x1 - x0, a - 1.0);
            if u0 <= u1 {
                weights[k] += near;
                weights[k + 1] += far;
            } else {
                weights[k] += far;
                weights[k + 1] += near;
            }
        }
        for p in ps.iter().filter(|p| p.mass > 0.0) {
            let lo = nodes.partition_point(|s| *s < p.lo - 1e-14);
            let hi = nodes.partition_point(|s| *s < p.hi - 1e-14);
            weights[lo] += 0.5 * p.mass;
            weights[hi] += 0.5 * p.mass;
        }
        Ok(HBlock {
            j: b.j,
            nodes,
            weights,
            exact: exact.value,
        })
    }
}

impl HWeights {
    /// Weights for every block `j ∈ j_range` of `set` (pass the augmented set
    /// to include the lacunary points).
    pub fn build(set: &DilationSet, beta: f64, j_range: (i32, i32), resolution: PathResolution) -> Result<HWeights> {
        resolution.validate()?;
        if j_range.1 < j_range.0 {
            return Err(Error::param("j_range", "must be nonempty"));
        }
        let blocks = (j_range.0..=j_range.1)
            .map(|j| {
                let b = set.rescaled_block::<f64>(j)?;
                HBlock::build(&b, beta, resolution.block_spacing(j), resolution.grade_levels)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HWeights {
            beta,
            j_range,
            resolution,
            blocks,
        })
    }

    /// `sup_j Σ_k w_{j,k}`.
    pub fn sup_mass(&self) -> f64 {
        self.blocks.iter().map(HBlock::mass).fold(0.0, f64::max)
    }

    /// The global `t`-grid: `0`, uniform nodes below `2^{j_lo}` and
    /// `2^j s_k` for every block, with the index of each block node.
    pub fn t_grid(&self) -> (Vec<f64>, Vec<Vec<usize>>) {
        let lo = 2f64.powi(self.j_range.0);
        let n = (lo / self.resolution.block_spacing(self.j_range.0).min(self.resolution.dt))
            .ceil()
            .max(4.0) as usize;
        let mut t: Vec<f64> = (0..n).map(|k| lo * k as f64 / n as f64).collect();
        for b in &self.blocks {
            let scale = 2f64.powi(b.j);
            t.extend(b.nodes.iter().map(|s| s * scale));
        }
        t.sort_by(f64::total_cmp);
        t.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());
        let index = self
            .blocks
            .iter()
            .map(|b| {
                let scale = 2f64.powi(b.j);
                b.nodes
                    .iter()
                    .map(|s| {
                        let x = s * scale;
                        let k = t.partition_point(|v| *v < x);
                        if k < t.len() && (t[k] - x).abs() <= 1e-14 * x {
                            k
                        } else {
                            k - 1
                        }
                    })
                    .collect()
            })
            .collect();
        (t, index)
    }
}

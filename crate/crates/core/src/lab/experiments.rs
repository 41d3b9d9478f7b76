//! Experiment configurations, the drivers behind them and their reports.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::operators::{maximal_function, square_functional, Histogram};
use super::weights::{HWeights, PathResolution};
use crate::dilation::{default_delta_schedule, kappa, DilationSet};
use crate::error::{Error, Result};
use crate::frames::{GridFunction, Side, SmoothCutoff};
use crate::multipliers::{Multiplier, MultiplierSpec};
use crate::numerics::fit_line;

type C64 = Complex<f64>;

/// Largest relative change of the maximal-to-square ratio under refinement.
pub const REFINEMENT_TOLERANCE: f64 = 0.1;
/// Default constant in the H-norm bound.
pub const H_NORM_CONSTANT: f64 = 16.0;
/// Largest depth-doubling increment accepted for the maximal function.
pub const MAXIMAL_INCREMENT: f64 = 0.02;
/// Pixels where both sides fall below this fraction of their maxima are
/// left out of ratios.
pub const EXCLUSION: f64 = 1e-12;
/// Allowed shortfall of the fitted half-wave rate.
pub const RATE_SLACK: f64 = 0.1;
/// Cap used when estimating `κ`; tails are handled analytically.
const KAPPA_CAP: usize = 4096;
/// Samples of `r ∈ [1/2, 2]` per band for `sup |m(2^j·)ψ̂|`.
const SUP_SAMPLES: usize = 2048;
/// Bands `|j| ≤ SUP_BANDS` enter `σ²_∞`.
const SUP_BANDS: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub n: usize,
    /// Half period `L`.
    pub extent: f64,
    pub dim: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n: 1024,
            extent: 8.0,
            dim: 1,
        }
    }
}

/// Built-in initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FProfile {
    /// `e^{−π|x|²/w²}`.
    GaussianBump { width: f64 },
    /// `e^{−π|x|²/w²} e^{2πi ν x₁}`.
    ModulatedBump { width: f64, freq: f64 },
    /// Random phases on the grid frequencies with `lo ≤ |ξ| ≤ hi`; the seed
    /// defaults to the experiment seed.
    RandomBand {
        lo: f64,
        hi: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
    /// `e^{2πi ν x₁}` with `ν` snapped to the grid.
    Mode { freq: f64 },
}

impl FProfile {
    pub fn gaussian_bump(width: f64) -> Self {
        FProfile::GaussianBump { width }
    }

    pub fn modulated_bump(width: f64, freq: f64) -> Self {
        FProfile::ModulatedBump { width, freq }
    }

    pub fn random_band(lo: f64, hi: f64, seed: Option<u64>) -> Self {
        FProfile::RandomBand { lo, hi, seed }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FProfile::GaussianBump { width } | FProfile::ModulatedBump { width, .. } if !(*width > 0.0) => {
                Err(Error::param("width", "must be positive"))
            }
            FProfile::RandomBand { lo, hi, .. } if !(*lo >= 0.0 && hi > lo) => {
                Err(Error::param("band", "need 0 <= lo < hi"))
            }
            _ => Ok(()),
        }
    }

    pub fn build(&self, grid: &GridSpec, seed: u64) -> Result<GridFunction<f64>> {
        self.validate()?;
        let (n, l) = (grid.n, grid.extent);
        let bump = |w: f64| move |r2: f64| (-PI * r2 / (w * w)).exp();
        let snap = |nu: f64| (nu * 2.0 * l).round() / (2.0 * l);
        match (self, grid.dim) {
            (FProfile::GaussianBump { width }, 1) => {
                let g = bump(*width);
                GridFunction::from_fn_1d(n, l, |x| C64::new(g(x * x), 0.0))
            }
            (FProfile::GaussianBump { width }, _) => {
                let g = bump(*width);
                GridFunction::from_fn_2d(n, l, |x, y| C64::new(g(x * x + y * y), 0.0))
            }
            (FProfile::ModulatedBump { width, freq }, 1) => {
                let g = bump(*width);
                GridFunction::from_fn_1d(n, l, |x| C64::from_polar(g(x * x), 2.0 * PI * freq * x))
            }
            (FProfile::ModulatedBump { width, freq }, _) => {
                let g = bump(*width);
                GridFunction::from_fn_2d(n, l, |x, y| C64::from_polar(g(x * x + y * y), 2.0 * PI * freq * x))
            }
            (FProfile::Mode { freq }, 1) => {
                let nu = snap(*freq);
                GridFunction::from_fn_1d(n, l, |x| C64::from_polar(1.0, 2.0 * PI * nu * x))
            }
            (FProfile::Mode { freq }, _) => {
                let nu = snap(*freq);
                GridFunction::from_fn_2d(n, l, |x, _| C64::from_polar(1.0, 2.0 * PI * nu * x))
            }
            (FProfile::RandomBand { lo, hi, seed: own }, _) => {
                let template = GridFunction::<f64>::zeros(grid.dim, n, l)?;
                let mut rng = ChaCha8Rng::seed_from_u64(own.unwrap_or(seed));
                let samples = template
                    .frequency_radii()
                    .iter()
                    .map(|r| {
                        let phase: f64 = rng.gen::<f64>();
                        if (*lo..=*hi).contains(r) {
                            C64::from_polar(1.0, 2.0 * PI * phase)
                        } else {
                            C64::new(0.0, 0.0)
                        }
                    })
                    .collect();
                Ok(GridFunction::new(grid.dim, n, l, samples, Side::Frequency)?.to_space())
            }
        }
    }
}

/// Indices `n` of the sequence terms used as half-wave times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSchedule {
    pub n_min: u64,
    pub n_max: u64,
    /// Log-spaced indices between the two ends.
    pub points: usize,
}

impl Default for TimeSchedule {
    fn default() -> Self {
        TimeSchedule {
            n_min: 16,
            n_max: 4096,
            points: 17,
        }
    }
}

impl TimeSchedule {
    pub fn indices(&self) -> Result<Vec<u64>> {
        if self.n_min == 0 || self.n_max <= self.n_min || self.points < 2 {
            return Err(Error::param("schedule", "need 1 <= n_min < n_max and at least two points"));
        }
        let (a, b) = ((self.n_min as f64).ln(), (self.n_max as f64).ln());
        let mut v: Vec<u64> = (0..self.points)
            .map(|k| (a + (b - a) * k as f64 / (self.points - 1) as f64).exp().round() as u64)
            .collect();
        v.dedup();
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Lemma31,
    Maximal,
    HNorm,
    Probe,
    Halfwave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(rename = "E")]
    pub set: DilationSet,
    #[serde(rename = "m")]
    pub multiplier: MultiplierSpec,
    pub f: FProfile,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub grid: GridSpec,
    pub j_range: (i32, i32),
    pub seed: u64,
    /// Materialized points per block for suprema over `E`.
    pub sampling_depth: usize,
    pub resolution: PathResolution,
    /// Test functions in the operator-norm probe.
    pub trials: usize,
    /// Extra `β` values whose maximal-to-square ratios are recorded.
    pub beta_sweep: Vec<f64>,
    /// `LimitedDecay(a)` exponents probed for the regularity threshold.
    pub regularity_sweep: Vec<f64>,
    /// `|ξ|` range and sample count for the H-norm.
    pub xi_range: (f64, f64),
    pub xi_samples: usize,
    pub h_constant: f64,
    pub schedule: TimeSchedule,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::Lemma31,
            set: DilationSet::power_sequence(1.0),
            multiplier: MultiplierSpec::band_bump(),
            f: FProfile::gaussian_bump(1.0),
            alpha: 0.45,
            beta: 0.3,
            p: 2.0,
            grid: GridSpec::default(),
            j_range: (-4, 3),
            seed: 0,
            sampling_depth: 64,
            resolution: PathResolution::default(),
            trials: 4,
            beta_sweep: Vec::new(),
            regularity_sweep: Vec::new(),
            xi_range: (0.25, 4.0),
            xi_samples: 33,
            h_constant: H_NORM_CONSTANT,
            schedule: TimeSchedule::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.set.validate()?;
        self.multiplier.validate()?;
        self.f.validate()?;
        self.resolution.validate()?;
        if self.j_range.1 < self.j_range.0 {
            return Err(Error::param("j_range", "must be nonempty"));
        }
        if self.sampling_depth == 0 {
            return Err(Error::param("sampling_depth", "must be positive"));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::param("p", "must lie in (1, inf)"));
        }
        GridFunction::<f64>::zeros(self.grid.dim, self.grid.n, self.grid.extent)?;
        match self.experiment {
            ExperimentKind::Halfwave => {
                if !(self.alpha > 0.0 && self.alpha < 1.0) {
                    return Err(Error::param("alpha", "must lie in (0, 1)"));
                }
                if !(self.beta > 0.0 && self.beta < 1.0) {
                    return Err(Error::param("beta", "must lie in (0, 1)"));
                }
                self.schedule.indices()?;
            }
            ExperimentKind::HNorm => {
                if !(self.beta > 0.0 && self.beta < 0.5) {
                    return Err(Error::param("beta", "must lie in (0, 1/2)"));
                }
                if !(self.xi_range.0 > 0.0 && self.xi_range.1 > self.xi_range.0) || self.xi_samples < 2 {
                    return Err(Error::param("xi_range", "need 0 < lo < hi and at least two samples"));
                }
            }
            _ => {
                if !(self.beta > 0.0 && self.beta < self.alpha && self.alpha <= 0.5) {
                    return Err(Error::param("alpha", "need 0 < beta < alpha <= 1/2"));
                }
            }
        }
        if self.experiment == ExperimentKind::Probe && self.trials == 0 {
            return Err(Error::param("trials", "must be at least 1"));
        }
        Ok(())
    }
}

/// `κ(E)` over `j_range` on the default `δ` schedule.
pub fn kappa_estimate(set: &DilationSet, j_range: (i32, i32)) -> Result<f64> {
    let s = set.clone().with_cap(KAPPA_CAP);
    Ok(kappa::<f64>(&s, &default_delta_schedule(), j_range)?.value)
}

fn require_beta_above_kappa(beta: f64, kappa: f64) -> Result<()> {
    if beta <= 0.5 * kappa {
        return Err(Error::param("beta", format!("must exceed kappa/2 = {:.4}", 0.5 * kappa)));
    }
    Ok(())
}

/// One resolution level of the maximal-to-square comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma31Level {
    pub sampling_depth: usize,
    pub resolution: PathResolution,
    pub max_ratio: f64,
    pub finite: bool,
    pub pixels_used: usize,
    pub pixels_excluded: usize,
    pub times: usize,
    pub path_nodes: usize,
    pub weight_sup_mass: f64,
    pub maximal_increment: Option<f64>,
    /// Per-pixel ratios, `NaN` where excluded.
    #[serde(skip)]
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma31Report {
    pub kappa: f64,
    pub base: Lemma31Level,
    pub refined: Lemma31Level,
    /// `|refined − base| / base` of the maximal ratio.
    pub relative_change: f64,
    pub histogram: Histogram,
    /// `(β, max ratio)` at the base level.
    pub beta_trend: Vec<(f64, f64)>,
    pub pass: bool,
}

fn lemma31_level(
    cfg: &ExperimentConfig,
    f: &GridFunction<f64>,
    set: &DilationSet,
    beta: f64,
    depth: usize,
    resolution: PathResolution,
) -> Result<Lemma31Level> {
    let w = HWeights::build(&set.clone().with_cap(depth), beta, cfg.j_range, resolution)?;
    let max = maximal_function(f, &cfg.multiplier, set, depth, cfg.j_range)?;
    let sq = square_functional(f, &cfg.multiplier, cfg.alpha, &w)?;
    let num: Vec<f64> = max.function.samples.iter().map(|v| v.re * v.re).collect();
    let den: Vec<f64> = sq.function.samples.iter().map(|v| v.re).collect();
    let num_max = num.iter().copied().fold(0.0, f64::max);
    let den_max = den.iter().copied().fold(0.0, f64::max);
    let mut used = 0;
    let mut finite = sq.flagged.is_empty();
    let mut max_ratio = 0.0f64;
    let ratios: Vec<f64> = num
        .iter()
        .zip(&den)
        .map(|(a, b)| {
            if *a <= EXCLUSION * num_max && *b <= EXCLUSION * den_max {
                return f64::NAN;
            }
            used += 1;
            let r = if *b > 0.0 { a / b } else { f64::INFINITY };
            finite &= r.is_finite();
            max_ratio = max_ratio.max(r);
            r
        })
        .collect();
    Ok(Lemma31Level {
        sampling_depth: depth,
        resolution,
        max_ratio,
        finite,
        pixels_used: used,
        pixels_excluded: num.len() - used,
        times: max.times,
        path_nodes: sq.path_nodes,
        weight_sup_mass: w.sup_mass(),
        maximal_increment: max.increment,
        ratios,
    })
}

/// Ratio `sup_{t∈E}|F(t)|² / Σ_j ∫ d^{−1+2β}|D^α F_j|²` per pixel at the
/// configured resolution and with both the sampling depth and the path grid
/// doubled. `E` is augmented by the lacunary points.
pub fn lemma31_ratio(cfg: &ExperimentConfig) -> Result<Lemma31Report> {
    cfg.validate()?;
    let set = cfg.set.augmented();
    let kappa = kappa_estimate(&set, cfg.j_range)?;
    require_beta_above_kappa(cfg.beta, kappa)?;
    let f = cfg.f.build(&cfg.grid, cfg.seed)?;
    let base = lemma31_level(cfg, &f, &set, cfg.beta, cfg.sampling_depth, cfg.resolution)?;
    let refined = lemma31_level(
        cfg,
        &f,
        &set,
        cfg.beta,
        2 * cfg.sampling_depth,
        cfg.resolution.refined(),
    )?;
    let relative_change = if base.max_ratio > 0.0 {
        (refined.max_ratio - base.max_ratio).abs() / base.max_ratio
    } else {
        0.0
    };
    let beta_trend = cfg
        .beta_sweep
        .iter()
        .map(|b| {
            let mut c = cfg.clone();
            c.beta = *b;
            c.validate()?;
            require_beta_above_kappa(*b, kappa)?;
            Ok((*b, lemma31_level(&c, &f, &set, *b, cfg.sampling_depth, cfg.resolution)?.max_ratio))
        })
        .collect::<Result<Vec<_>>>()?;
    let histogram = Histogram::log2(&refined.ratios, 16);
    let pass = base.finite && refined.finite && relative_change < REFINEMENT_TOLERANCE;
    Ok(Lemma31Report {
        kappa,
        base,
        refined,
        relative_change,
        histogram,
        beta_trend,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalReport {
    pub l2_norm: f64,
    pub sup_norm: f64,
    pub f_l2_norm: f64,
    pub times: usize,
    pub increment: Option<f64>,
    pub pass: bool,
}

pub fn maximal_experiment(cfg: &ExperimentConfig) -> Result<MaximalReport> {
    cfg.validate()?;
    let f = cfg.f.build(&cfg.grid, cfg.seed)?;
    let out = maximal_function(&f, &cfg.multiplier, &cfg.set, cfg.sampling_depth, cfg.j_range)?;
    Ok(MaximalReport {
        l2_norm: out.function.l2_norm(),
        sup_norm: out.function.sup_norm(),
        f_l2_norm: f.l2_norm(),
        times: out.times,
        increment: out.increment,
        pass: out.increment.is_none_or(|d| d < MAXIMAL_INCREMENT),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HNormReport {
    /// `sup_ξ ‖M_m(ξ)‖_H`.
    pub sup_h: f64,
    /// `(Σ_j ‖m(2^j·)ψ̂‖_∞²)^{1/2}`.
    pub sigma2_inf: f64,
    /// `0/0` is reported as 0.
    pub ratio: f64,
    pub constant: f64,
    pub weight_sup_mass: f64,
    /// `(|ξ|, ‖M_m(ξ)‖_H)`.
    pub samples: Vec<(f64, f64)>,
    pub pass: bool,
}

/// `(Σ_{|j| ≤ 64} sup_{1/2 ≤ r ≤ 2} |m(2^j r) ψ̂(r)|²)^{1/2}`.
pub fn sigma2_sup<M: Multiplier + ?Sized>(m: &M) -> f64 {
    let cut = SmoothCutoff::default();
    let r: Vec<f64> = (0..=SUP_SAMPLES)
        .map(|k| 0.5 * 4f64.powf(k as f64 / SUP_SAMPLES as f64))
        .collect();
    (-SUP_BANDS..=SUP_BANDS)
        .into_par_iter()
        .map(|j| {
            let s = 2f64.powi(j);
            r.iter().map(|r| m.radial(s * r).norm() * cut.psi(*r)).fold(0.0, f64::max).powi(2)
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum::<f64>()
        .sqrt()
}

/// `‖M_m(ξ)‖_H = (Σ_j ∫_1^2 d(s,Ẽ_j)^{−1+2β} |m(2^j s ξ)|² ds)^{1/2}` at each
/// radius, against `σ²_∞`.
pub fn mm_linf_h_norm<M: Multiplier + ?Sized>(m: &M, w: &HWeights, xi: &[f64], constant: f64) -> HNormReport {
    let samples: Vec<(f64, f64)> = xi
        .par_iter()
        .map(|r| {
            let h2: f64 = w
                .blocks
                .iter()
                .map(|b| {
                    let scale = 2f64.powi(b.j) * r;
                    b.nodes
                        .iter()
                        .zip(&b.weights)
                        .map(|(s, wk)| wk * m.radial(scale * s).norm_sqr())
                        .sum::<f64>()
                })
                .sum();
            (*r, h2.sqrt())
        })
        .collect();
    let sup_h = samples.iter().map(|(_, h)| *h).fold(0.0, f64::max);
    let sigma2_inf = sigma2_sup(m);
    let ratio = if sigma2_inf > 0.0 {
        sup_h / sigma2_inf
    } else if sup_h > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    HNormReport {
        sup_h,
        sigma2_inf,
        ratio,
        constant,
        weight_sup_mass: w.sup_mass(),
        samples,
        pass: ratio <= constant,
    }
}

/// Log-spaced radii over `range`.
pub fn log_samples(range: (f64, f64), n: usize) -> Vec<f64> {
    let (a, b) = (range.0.ln(), range.1.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1).max(1) as f64).exp())
        .collect()
}

/// Block window for the H-norm: every band the radii can reach, with the
/// decay of `m` covered by a further twelve octaves.
fn h_norm_window(xi_range: (f64, f64)) -> (i32, i32) {
    let lo = (-2.0 - xi_range.1.log2()).floor() as i32;
    let hi = (12.0 - xi_range.0.log2()).ceil() as i32;
    (lo, hi)
}

pub fn h_norm_experiment(cfg: &ExperimentConfig) -> Result<HNormReport> {
    cfg.validate()?;
    let set = cfg.set.augmented().with_cap(cfg.sampling_depth);
    let window = h_norm_window(cfg.xi_range);
    // |m|² does not oscillate along s, so only the s-spacing matters
    let res = PathResolution {
        dt: 1e300,
        ..cfg.resolution
    };
    let w = HWeights::build(&set, cfg.beta, window, res)?;
    let xi = log_samples(cfg.xi_range, cfg.xi_samples);
    Ok(mm_linf_h_norm(&cfg.multiplier, &w, &xi, cfg.h_constant))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    /// `max_f ‖M_m^E f‖_p / ‖f‖_p` over the trials.
    pub lower_bound: f64,
    pub trials: Vec<f64>,
    pub kappa: f64,
    /// `d|1/2 − 1/p| + κ/2`.
    pub threshold: f64,
    /// `(a, bound)` for `LimitedDecay(a)`.
    pub sweep: Vec<(f64, f64)>,
}

fn probe_functions(cfg: &ExperimentConfig) -> Result<Vec<GridFunction<f64>>> {
    (0..cfg.trials)
        .map(|k| {
            let f = if k == 0 {
                cfg.f.build(&cfg.grid, cfg.seed)?
            } else {
                let lo = 0.25 * 2f64.powi((k as i32 - 1) % 4);
                FProfile::random_band(lo, 2.0 * lo, None).build(&cfg.grid, cfg.seed.wrapping_add(k as u64))?
            };
            Ok(f)
        })
        .collect()
}

fn probe_bound<M: Multiplier + ?Sized>(cfg: &ExperimentConfig, m: &M, fs: &[GridFunction<f64>]) -> Result<Vec<f64>> {
    fs.iter()
        .map(|f| {
            let norm = f.lp_norm(cfg.p);
            if norm == 0.0 {
                return Ok(0.0);
            }
            let out = maximal_function(f, m, &cfg.set, cfg.sampling_depth, cfg.j_range)?;
            Ok(out.function.lp_norm(cfg.p) / norm)
        })
        .collect()
}

/// Empirical lower bound for `‖M_m^E‖_{p→p}` from built-in test functions.
pub fn operator_norm_probe(cfg: &ExperimentConfig) -> Result<ProbeReport> {
    cfg.validate()?;
    let fs = probe_functions(cfg)?;
    let trials = probe_bound(cfg, &cfg.multiplier, &fs)?;
    let kappa = kappa_estimate(&cfg.set, cfg.j_range)?;
    let d = cfg.grid.dim as f64;
    let sweep = cfg
        .regularity_sweep
        .iter()
        .map(|a| {
            let m = MultiplierSpec::limited_decay(*a);
            m.validate()?;
            let b = probe_bound(cfg, &m, &fs)?;
            Ok((*a, b.into_iter().fold(0.0, f64::max)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeReport {
        lower_bound: trials.iter().copied().fold(0.0, f64::max),
        trials,
        kappa,
        threshold: d * (0.5 - 1.0 / cfg.p).abs() + 0.5 * kappa,
        sweep,
    })
}

/// `e^{−it(2π|ξ|)^α} f̂(ξ)` transformed back to space.
pub fn halfwave_evolve(f: &GridFunction<f64>, alpha: f64, t: f64) -> GridFunction<f64> {
    f.radial_multiply(|r| C64::from_polar(1.0, -t * (2.0 * PI * r).powf(alpha)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfwaveReport {
    pub beta_fit: f64,
    pub target_beta: f64,
    pub residual: f64,
    /// `(t, sup |e^{−it(−Δ)^{α/2}}f − f|)`.
    pub samples: Vec<(f64, f64)>,
    pub pass: bool,
}

/// Fitted exponent of `sup_x |e^{−it(−Δ)^{α/2}}f − f|` as `t → 0` along the
/// offsets `t_n` of `E = {offset + t_n}`.
pub fn halfwave_convergence(
    f: &GridFunction<f64>,
    alpha: f64,
    beta: f64,
    set: &DilationSet,
    schedule: &TimeSchedule,
) -> Result<HalfwaveReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", "must lie in (0, 1)"));
    }
    let (rule, _) = set
        .generator
        .as_sequence()
        .ok_or_else(|| Error::param("E", "half-wave times need a sequence set"))?;
    let spec = f.to_frequency();
    let radii = f.frequency_radii();
    let samples: Vec<(f64, f64)> = schedule
        .indices()?
        .par_iter()
        .filter(|n| rule.len().is_none_or(|len| **n <= len))
        .map(|n| {
            let t = rule.term(*n);
            let mut d = spec.clone();
            for (v, r) in d.samples.iter_mut().zip(&radii) {
                *v *= C64::from_polar(1.0, -t * (2.0 * PI * r).powf(alpha)) - 1.0;
            }
            (t, d.sup_norm())
        })
        .collect();
    let (x, y): (Vec<f64>, Vec<f64>) = samples
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(t, e)| (t.ln(), e.ln()))
        .unzip();
    let fit = fit_line(&x, &y).ok_or_else(|| Error::param("schedule", "too few nonzero differences for a fit"))?;
    Ok(HalfwaveReport {
        beta_fit: fit.slope,
        target_beta: beta,
        residual: fit.residual,
        samples,
        pass: fit.slope >= beta - RATE_SLACK,
    })
}

pub fn halfwave_experiment(cfg: &ExperimentConfig) -> Result<HalfwaveReport> {
    cfg.validate()?;
    let f = cfg.f.build(&cfg.grid, cfg.seed)?;
    halfwave_convergence(&f, cfg.alpha, cfg.beta, &cfg.set, &cfg.schedule)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentResult {
    Lemma31(Lemma31Report),
    Maximal(MaximalReport),
    HNorm(HNormReport),
    Probe(ProbeReport),
    Halfwave(HalfwaveReport),
}

/// All inputs echoed with the outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub result: ExperimentResult,
    pub pass: bool,
}

/// A plot-ready table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(name: &str, header: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Table {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let (result, pass) = match cfg.experiment {
        ExperimentKind::Lemma31 => {
            let r = lemma31_ratio(cfg)?;
            let p = r.pass;
            (ExperimentResult::Lemma31(r), p)
        }
        ExperimentKind::Maximal => {
            let r = maximal_experiment(cfg)?;
            let p = r.pass;
            (ExperimentResult::Maximal(r), p)
        }
        ExperimentKind::HNorm => {
            let r = h_norm_experiment(cfg)?;
            let p = r.pass;
            (ExperimentResult::HNorm(r), p)
        }
        ExperimentKind::Probe => (ExperimentResult::Probe(operator_norm_probe(cfg)?), true),
        ExperimentKind::Halfwave => {
            let r = halfwave_experiment(cfg)?;
            let p = r.pass;
            (ExperimentResult::Halfwave(r), p)
        }
    };
    Ok(ExperimentReport {
        config: cfg.clone(),
        result,
        pass,
    })
}

impl ExperimentReport {
    /// CSV-ready tables: per-pixel ratios and histograms, per-sample norms,
    /// rate data.
    pub fn tables(&self) -> Vec<Table> {
        match &self.result {
            ExperimentResult::Lemma31(r) => {
                let x = GridFunction::<f64>::zeros(1, self.config.grid.n, self.config.grid.extent)
                    .map(|g| g.coordinates())
                    .unwrap_or_default();
                let pixels = r
                    .base
                    .ratios
                    .iter()
                    .zip(&r.refined.ratios)
                    .enumerate()
                    .map(|(i, (a, b))| vec![x.get(i).copied().unwrap_or(i as f64), *a, *b])
                    .collect();
                let hist = r
                    .histogram
                    .edges
                    .iter()
                    .zip(&r.histogram.counts)
                    .map(|(e, c)| vec![*e, *c as f64])
                    .collect();
                let mut t = vec![
                    Table::new("pixel_ratios", &["x", "ratio_base", "ratio_refined"], pixels),
                    Table::new("ratio_histogram", &["log2_ratio_lo", "count"], hist),
                ];
                if !r.beta_trend.is_empty() {
                    let rows = r.beta_trend.iter().map(|(b, v)| vec![*b, *v]).collect();
                    t.push(Table::new("beta_trend", &["beta", "max_ratio"], rows));
                }
                t
            }
            ExperimentResult::Maximal(r) => vec![Table::new(
                "maximal",
                &["l2_norm", "sup_norm", "f_l2_norm", "times", "increment"],
                vec![vec![
                    r.l2_norm,
                    r.sup_norm,
                    r.f_l2_norm,
                    r.times as f64,
                    r.increment.unwrap_or(f64::NAN),
                ]],
            )],
            ExperimentResult::HNorm(r) => vec![Table::new(
                "h_norm",
                &["xi", "h_norm"],
                r.samples.iter().map(|(a, b)| vec![*a, *b]).collect(),
            )],
            ExperimentResult::Probe(r) => vec![
                Table::new(
                    "probe_trials",
                    &["trial", "ratio"],
                    r.trials.iter().enumerate().map(|(k, v)| vec![k as f64, *v]).collect(),
                ),
                Table::new(
                    "regularity_sweep",
                    &["a", "lower_bound"],
                    r.sweep.iter().map(|(a, b)| vec![*a, *b]).collect(),
                ),
            ],
            ExperimentResult::Halfwave(r) => vec![Table::new(
                "halfwave",
                &["t", "sup_difference"],
                r.samples.iter().map(|(a, b)| vec![*a, *b]).collect(),
            )],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_json_roundtrip_and_defaults() {
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"experiment": "halfwave", "alpha": 0.5, "beta": 0.4}"#).unwrap();
        assert_eq!(cfg.grid, GridSpec::default());
        let s = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cfg);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"alpah": 0.5}"#).is_err());
    }

    #[test]
    fn parameter_order_is_enforced() {
        let mut cfg = ExperimentConfig::default();
        cfg.beta = 0.5;
        assert!(cfg.validate().is_err());
        cfg.beta = 0.3;
        cfg.alpha = 0.6;
        assert!(cfg.validate().is_err());
        cfg.alpha = 0.45;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn random_band_is_seeded() {
        let g = GridSpec {
            n: 256,
            extent: 8.0,
            dim: 1,
        };
        let a = FProfile::random_band(1.0, 2.0, None).build(&g, 7).unwrap();
        let b = FProfile::random_band(1.0, 2.0, None).build(&g, 7).unwrap();
        let c = FProfile::random_band(1.0, 2.0, None).build(&g, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let spec = a.to_frequency();
        for (v, r) in spec.samples.iter().zip(spec.frequency_radii()) {
            if !(1.0..=2.0).contains(&r) {
                assert!(v.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn halfwave_at_time_zero_is_identity() {
        let f = FProfile::gaussian_bump(1.0).build(&GridSpec::default(), 0).unwrap();
        let g = halfwave_evolve(&f, 0.5, 0.0);
        for (a, b) in f.samples.iter().zip(&g.samples) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn single_mode_rate_is_one() {
        let f = FProfile::Mode { freq: 1.0 }.build(&GridSpec::default(), 0).unwrap();
        let r = halfwave_convergence(&f, 0.5, 0.4, &DilationSet::power_sequence(1.0), &TimeSchedule::default()).unwrap();
        assert!((r.beta_fit - 1.0).abs() < 0.02, "{}", r.beta_fit);
        // |e^{−itc} − 1| = 2|sin(tc/2)| with c = (2π)^{1/2}
        let c = (2.0 * PI).sqrt();
        for (t, e) in &r.samples {
            assert!((e - 2.0 * (0.5 * t * c).sin().abs()).abs() < 1e-12, "{t}");
        }
    }

    #[test]
    fn gaussian_halfwave_rate() {
        let f = FProfile::gaussian_bump(1.0).build(&GridSpec::default(), 0).unwrap();
        let r = halfwave_convergence(&f, 0.5, 0.4, &DilationSet::power_sequence(1.0), &TimeSchedule::default()).unwrap();
        assert!(r.pass && r.beta_fit >= 0.3, "{r:?}");
    }

    #[test]
    fn h_norm_of_zero_is_zero() {
        let cfg = ExperimentConfig {
            experiment: ExperimentKind::HNorm,
            multiplier: MultiplierSpec::zero(),
            set: DilationSet::lacunary(),
            ..Default::default()
        };
        let r = h_norm_experiment(&cfg).unwrap();
        assert_eq!((r.sup_h, r.sigma2_inf, r.ratio), (0.0, 0.0, 0.0));
        assert!(r.pass);
    }

    #[test]
    fn h_norm_of_band_bump() {
        for set in [DilationSet::lacunary(), DilationSet::power_sequence(1.0)] {
            let cfg = ExperimentConfig {
                experiment: ExperimentKind::HNorm,
                set,
                ..Default::default()
            };
            let r = h_norm_experiment(&cfg).unwrap();
            assert!(r.pass && r.ratio > 0.0, "{r:?}");
        }
    }

    #[test]
    fn probe_bounds() {
        let base = ExperimentConfig {
            experiment: ExperimentKind::Probe,
            set: DilationSet::explicit(vec![1.0]),
            grid: GridSpec {
                n: 256,
                extent: 8.0,
                dim: 1,
            },
            trials: 3,
            j_range: (-2, 2),
            ..Default::default()
        };
        let zero = operator_norm_probe(&ExperimentConfig {
            multiplier: MultiplierSpec::zero(),
            ..base.clone()
        })
        .unwrap();
        assert_eq!(zero.lower_bound, 0.0);
        // Plancherel: ‖T_m f‖₂ ≤ sup|m| ‖f‖₂ = ‖f‖₂
        let one = operator_norm_probe(&base).unwrap();
        assert!(one.lower_bound <= 1.0 + 1e-10 && one.lower_bound > 0.0);
        let bigger = operator_norm_probe(&ExperimentConfig {
            set: DilationSet::explicit(vec![1.0, 1.5]),
            ..base.clone()
        })
        .unwrap();
        assert!(bigger.lower_bound >= one.lower_bound);
    }

    #[test]
    fn zero_data_excludes_every_pixel() {
        let cfg = ExperimentConfig {
            f: FProfile::random_band(100.0, 200.0, None),
            set: DilationSet::lacunary(),
            grid: GridSpec {
                n: 128,
                extent: 4.0,
                dim: 1,
            },
            j_range: (-2, 1),
            ..Default::default()
        };
        let r = lemma31_ratio(&cfg).unwrap();
        assert_eq!(r.base.pixels_used, 0);
        assert!(r.pass);
    }
}

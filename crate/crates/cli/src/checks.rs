//! Verification suites: one function per acceptance criterion, grouped
//! into the suites exposed by `fracmax verify`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::time::Instant;

use anyhow::Result;
use clap::ValueEnum;
use num_complex::Complex;
use serde::Serialize;
use statrs::function::gamma::gamma;

use fracmax_core::dilation::{
    default_delta_schedule, dimension_bound_check, gap_sum_critical_exponent, kappa, lorentz_membership,
    minkowski_dimension, BlockSet, DilationSet, SequenceRule, BOUND_CONSTANT,
};
use fracmax_core::fractional::{
    marchaud_derivative, rescaled_derivative_check, roundtrip_residual, FractionalOrder, SampledPath,
};
use fracmax_core::frames::{
    besov_norm, dilation_invariance_check, hoelder_norm, sigma2_norm, sigma2_weighted_sobolev, BesovParams,
    GridFunction, SmoothCutoff, DILATION_CONSTANT,
};
use fracmax_core::lab::{
    halfwave_convergence, h_norm_experiment, lemma31_ratio, maximal_experiment, operator_norm_probe, ExperimentConfig,
    ExperimentKind, FProfile, GridSpec, TimeSchedule,
};
use fracmax_core::multipliers::{decay_profile, embedding_check, MultiplierSpec, EMBEDDING_CONSTANT};
use fracmax_core::numerics::fit_line;

type C = Complex<f64>;

/// One verified property with the quantities it was judged on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u32,
    pub name: String,
    pub pass: bool,
    /// Measured values; non-finite numbers serialize as `null`.
    pub measured: BTreeMap<String, f64>,
    /// Wall time of this check alone, where it is timed separately.
    #[serde(skip)]
    pub seconds: Option<f64>,
}

impl Check {
    fn new(criterion: u32, name: impl Into<String>, pass: bool) -> Self {
        Check {
            criterion,
            name: name.into(),
            pass,
            measured: BTreeMap::new(),
            seconds: None,
        }
    }

    fn timed(mut self, since: Instant) -> Self {
        self.seconds = Some(since.elapsed().as_secs_f64());
        self
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.measured.insert(key.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Dimension,
    Fraccalc,
    Frames,
    Multipliers,
    Maximal,
    All,
}

impl Suite {
    /// Criteria covered by the suite, in run order.
    pub fn criteria(self) -> Vec<u32> {
        match self {
            Suite::Dimension => vec![1, 2, 3, 4],
            Suite::Fraccalc => vec![5],
            Suite::Frames => vec![6, 12],
            Suite::Multipliers => vec![7, 10],
            Suite::Maximal => vec![8, 9, 11],
            Suite::All => (1..=12).collect(),
        }
    }
}

/// Runs the checks of one criterion (1 to 12).
pub fn criterion(n: u32, seed: u64) -> Result<Vec<Check>> {
    match n {
        1 => kappa_of_power_sequences(),
        2 => cantor_dimension(),
        3 => dimension_lemma(),
        4 => sequence_corollary(),
        5 => fractional_calculus(),
        6 => sigma2_band_slopes(),
        7 => oscillatory_decay(),
        8 => lemma31_stability(seed),
        9 => h_norm_bound(seed),
        10 => embedding_lemma(),
        11 => halfwave_rates(),
        12 => frame_sanity(),
        _ => anyhow::bail!("no criterion {n}"),
    }
}

/// The checks of one criterion with the wall time they took together.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionRun {
    pub criterion: u32,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<CriterionRun>> {
    suite
        .criteria()
        .into_iter()
        .map(|n| {
            let t = Instant::now();
            let checks = criterion(n, seed)?;
            Ok(CriterionRun {
                criterion: n,
                seconds: t.elapsed().as_secs_f64(),
                checks,
            })
        })
        .collect()
}

fn kappa_of_power_sequences() -> Result<Vec<Check>> {
    let schedule = default_delta_schedule();
    [1.0, 0.5, 2.0]
        .into_iter()
        .map(|a| {
            let t = Instant::now();
            let est = kappa::<f64>(&DilationSet::power_sequence(a), &schedule, (-4, 4))?;
            let target = 1.0 / (1.0 + a);
            Ok(Check::new(1, format!("kappa power_sequence a={a}"), (est.value - target).abs() <= 0.05)
                .with("value", est.value)
                .with("target", target)
                .with("delta_min", est.delta_range.0)
                .with("residual", est.residual)
                .timed(t))
        })
        .collect()
}

fn cantor_dimension() -> Result<Vec<Check>> {
    let b: BlockSet<f64> = DilationSet::middle_third_cantor(12).rescaled_block(0)?;
    let schedule: Vec<f64> = (1..=12).map(|k| 3f64.powi(-k)).collect();
    let est = minkowski_dimension(&b, &schedule)?;
    let target = 2f64.ln() / 3f64.ln();
    Ok(vec![Check::new(2, "cantor level 12 box dimension", (est.value - target).abs() <= 0.03)
        .with("value", est.value)
        .with("target", target)])
}

/// The ten sets of the two-sided dimension lemma check.
pub fn dimension_suite() -> Vec<(&'static str, DilationSet)> {
    vec![
        ("two_point", DilationSet::explicit(vec![1.0, 2.0])),
        ("cantor_6", DilationSet::middle_third_cantor(6)),
        ("cantor_9", DilationSet::middle_third_cantor(9)),
        ("cantor_12", DilationSet::middle_third_cantor(12)),
        ("power_0.5", DilationSet::power_sequence(0.5)),
        ("power_1", DilationSet::power_sequence(1.0)),
        ("power_2", DilationSet::power_sequence(2.0)),
        ("lacunary", DilationSet::lacunary()),
        (
            "cantor_6_and_power_1",
            DilationSet::union(vec![DilationSet::middle_third_cantor(6), DilationSet::power_sequence(1.0)]),
        ),
        (
            "two_point_and_power_2",
            DilationSet::union(vec![DilationSet::explicit(vec![1.0, 2.0]), DilationSet::power_sequence(2.0)]),
        ),
    ]
}

fn dimension_lemma() -> Result<Vec<Check>> {
    let schedule: Vec<f64> = (0..=24).map(|k| 10f64.powf(-k as f64 / 4.0)).collect();
    let mut out = Vec::new();
    for (name, set) in dimension_suite() {
        let b: BlockSet<f64> = set.rescaled_block(0)?;
        for a in [0.3, 0.5, 0.7] {
            let r = dimension_bound_check(&b, a, &schedule, BOUND_CONSTANT)?;
            out.push(
                Check::new(3, format!("dimension lemma {name} a={a}"), r.pass)
                    .with("lhs", r.lhs)
                    .with("mid", r.mid)
                    .with("rhs", r.rhs)
                    .with("ratio_lhs_mid", r.ratio_lhs_mid.unwrap_or(f64::NAN))
                    .with("ratio_mid_rhs", r.ratio_mid_rhs.unwrap_or(f64::NAN)),
            );
        }
    }
    Ok(out)
}

fn sequence_corollary() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for p in [0.5, 1.0, 2.0] {
        let s = DilationSet::sequence(SequenceRule::Power { exponent: p }, 0.0);
        let est = gap_sum_critical_exponent(&s, 1 << 22)?;
        let target = 1.0 / (1.0 + p);
        out.push(
            Check::new(4, format!("gap sum flip t_n=n^-{p}"), (est.value - target).abs() <= 0.05)
                .with("value", est.value)
                .with("target", target),
        );
    }
    let lorentz_schedule: Vec<f64> = (0..=24).map(|k| 10f64.powf(-k as f64 / 4.0)).collect();
    for r in [0.5, 1.0, 2.0] {
        let s = DilationSet::sequence(SequenceRule::Power { exponent: 1.0 / r }, 0.0);
        let rep = lorentz_membership(&s, r, &lorentz_schedule)?;
        out.push(
            Check::new(4, format!("lorentz t_n=n^-1/{r}"), rep.verdict && rep.bound <= 2.0).with("bound", rep.bound),
        );
        let d = minkowski_dimension::<f64>(
            &DilationSet::sequence(SequenceRule::Power { exponent: 1.0 / r }, 1.0).rescaled_block(0)?,
            &default_delta_schedule(),
        )?;
        let target = r / (1.0 + r);
        out.push(
            Check::new(4, format!("dimension t_n=n^-1/{r}"), (d.value - target).abs() <= 0.05)
                .with("value", d.value)
                .with("target", target),
        );
    }
    Ok(out)
}

fn order(alpha: f64) -> Result<FractionalOrder<f64>> {
    Ok(FractionalOrder::new(alpha)?)
}

fn fractional_calculus() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let profiles: [(&str, fn(f64) -> C); 2] = [
        ("t^2", |t| C::new(t * t, 0.0)),
        ("sin 2pi t", |t| C::new((TAU * t).sin(), 0.0)),
    ];
    for (name, f) in profiles {
        for alpha in [0.25, 0.5, 0.75] {
            let mut res = Vec::new();
            for n in [1024usize, 2048, 4096, 8192] {
                let p = SampledPath::uniform(1.0, n, f, Some(1.0))?;
                res.push(roundtrip_residual(&p, order(alpha)?)?);
            }
            let worst = res[2].max(res[3]);
            out.push(
                Check::new(5, format!("roundtrip {name} alpha={alpha}"), worst <= 1e-3)
                    .with("residual_4096", res[2])
                    .with("residual_8192", res[3]),
            );
            let min_ratio = res.windows(2).map(|w| w[0] / w[1]).fold(f64::INFINITY, f64::min);
            out.push(
                Check::new(5, format!("roundtrip halving {name} alpha={alpha}"), min_ratio >= 2.0)
                    .with("min_ratio", min_ratio),
            );
        }
    }
    for k in [1i32, 2, 3] {
        let p = SampledPath::uniform(2.0, 8192, |t: f64| C::new(t.powi(k), 0.0), Some(1.0))?;
        for alpha in [0.25, 0.5, 0.75] {
            let d = marchaud_derivative(&p, order(alpha)?)?;
            let b = k as f64;
            let c = gamma(b + 1.0) / gamma(b + 1.0 - alpha);
            let (mut err, mut size) = (0.0f64, 0.0f64);
            for (t, v) in d.grid.iter().zip(&d.values) {
                let exact = c * t.powf(b - alpha);
                err = err.max((v - exact).norm());
                size = size.max(exact);
            }
            out.push(
                Check::new(5, format!("marchaud t^{k} alpha={alpha}"), err / size <= 1e-4)
                    .with("relative_error", err / size),
            );
        }
    }
    let s_grid: Vec<f64> = (0..=20).map(|k| 1.0 + k as f64 / 20.0).collect();
    let cases: [(&str, f64, i32, f64, fn(f64) -> C); 3] = [
        ("t", 4.0, 1, 0.3, |t| C::new(t, 0.0)),
        ("t^2", 8.0, 2, 0.5, |t| C::new(t * t, 0.0)),
        ("sin t", 8.0, 2, 0.75, |t| C::new(t.sin(), 0.0)),
    ];
    for (name, t_max, j, alpha, f) in cases {
        let p = SampledPath::uniform(t_max, 4096, f, Some(1.0))?;
        let d = rescaled_derivative_check(&p, j, order(alpha)?, &s_grid)?;
        out.push(Check::new(5, format!("rescaled derivative {name} j={j}"), d <= 1e-5).with("discrepancy", d));
    }
    Ok(out)
}

fn sigma2_band_slopes() -> Result<Vec<Check>> {
    let cut = SmoothCutoff::default();
    let mut out = Vec::new();
    for a in [0.5, 1.0, 1.5] {
        let r = a - 0.3;
        let rep = sigma2_norm(&MultiplierSpec::limited_decay(a), &BesovParams::new(2.0, r, 12)?, (-3, 10), &cut)?;
        let (x, y): (Vec<f64>, Vec<f64>) = rep
            .bands
            .iter()
            .filter(|b| (2..=10).contains(&b.j))
            .map(|b| (b.j as f64, b.norm.log2()))
            .unzip();
        let slope = fit_line(&x, &y).map_or(f64::NAN, |f| f.slope);
        let low_zero = rep.bands.iter().filter(|b| b.j <= -1).all(|b| b.norm == 0.0);
        out.push(
            Check::new(6, format!("sigma2 slope limited_decay a={a}"), (slope - (r - a)).abs() <= 0.1 && low_zero)
                .with("slope", slope)
                .with("target", r - a)
                .with("low_bands_zero", if low_zero { 1.0 } else { 0.0 }),
        );
    }
    Ok(out)
}

fn oscillatory_decay() -> Result<Vec<Check>> {
    let fits = decay_profile(&MultiplierSpec::oscillatory(0.5, 1.0), (3, 10), 1)?;
    let slope = fits[1].slope;
    Ok(vec![Check::new(7, "oscillatory first derivative decay", (slope + 1.5).abs() <= 0.1)
        .with("slope", slope)
        .with("target", -1.5)])
}

/// Multipliers of the `lemma31` suite.
pub fn lemma31_multipliers() -> Vec<(&'static str, MultiplierSpec)> {
    vec![
        ("band_bump", MultiplierSpec::band_bump()),
        ("limited_decay_1", MultiplierSpec::limited_decay(1.0)),
    ]
}

/// Default `lemma31` configuration for one multiplier and set.
pub fn lemma31_config(m: MultiplierSpec, set: DilationSet, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        experiment: ExperimentKind::Lemma31,
        set,
        multiplier: m,
        seed,
        ..ExperimentConfig::default()
    }
}

fn lemma31_stability(seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (mname, m) in lemma31_multipliers() {
        for (sname, set) in [("lacunary", DilationSet::lacunary()), ("power_1", DilationSet::power_sequence(1.0))] {
            let t = Instant::now();
            let r = lemma31_ratio(&lemma31_config(m.clone(), set, seed))?;
            out.push(
                Check::new(8, format!("lemma31 {mname} {sname}"), r.pass)
                    .with("ratio_base", r.base.max_ratio)
                    .with("ratio_refined", r.refined.max_ratio)
                    .with("relative_change", r.relative_change)
                    .with("pixels_excluded", r.refined.pixels_excluded as f64)
                    .timed(t),
            );
        }
    }
    let probe = operator_norm_probe(&ExperimentConfig {
        experiment: ExperimentKind::Probe,
        grid: GridSpec {
            n: 512,
            ..GridSpec::default()
        },
        sampling_depth: 16,
        seed,
        ..ExperimentConfig::default()
    })?;
    out.push(
        Check::new(8, "operator norm probe is finite", probe.lower_bound.is_finite() && probe.lower_bound > 0.0)
            .with("lower_bound", probe.lower_bound)
            .with("threshold", probe.threshold),
    );
    let max = maximal_experiment(&ExperimentConfig {
        experiment: ExperimentKind::Maximal,
        set: DilationSet::lacunary(),
        seed,
        ..ExperimentConfig::default()
    })?;
    out.push(
        Check::new(8, "maximal function depth doubling on lacunary", max.pass)
            .with("increment", max.increment.unwrap_or(f64::NAN)),
    );
    Ok(out)
}

/// Cases of the H-norm suite: multiplier × set × β.
pub fn h_norm_suite() -> Vec<(String, MultiplierSpec, DilationSet, f64)> {
    let ms = [
        ("band_bump", MultiplierSpec::band_bump()),
        ("limited_decay_1", MultiplierSpec::limited_decay(1.0)),
        ("slow_decay_1_0.5", MultiplierSpec::slow_decay(1.0, 0.5)),
    ];
    let sets = [("lacunary", DilationSet::lacunary()), ("power_2", DilationSet::power_sequence(2.0))];
    let mut out = Vec::new();
    for (mn, m) in &ms {
        for (sn, s) in &sets {
            for beta in [0.25, 0.35] {
                out.push((format!("{mn} {sn} beta={beta}"), m.clone(), s.clone(), beta));
            }
        }
    }
    out
}

fn h_norm_bound(seed: u64) -> Result<Vec<Check>> {
    h_norm_suite()
        .into_iter()
        .map(|(name, m, set, beta)| {
            let r = h_norm_experiment(&ExperimentConfig {
                experiment: ExperimentKind::HNorm,
                set,
                multiplier: m,
                beta,
                seed,
                ..ExperimentConfig::default()
            })?;
            Ok(Check::new(9, format!("h norm {name}"), r.pass)
                .with("sup_h", r.sup_h)
                .with("sigma2_inf", r.sigma2_inf)
                .with("ratio", r.ratio))
        })
        .collect()
}

/// Multipliers of the embedding and weighted-Sobolev checks.
pub fn multiplier_suite() -> Vec<(&'static str, MultiplierSpec)> {
    vec![
        ("band_bump", MultiplierSpec::band_bump()),
        ("limited_decay_1.5", MultiplierSpec::limited_decay(1.5)),
        ("oscillatory_0.5_1", MultiplierSpec::oscillatory(0.5, 1.0)),
        ("slow_decay_1_0.5", MultiplierSpec::slow_decay(1.0, 0.5)),
    ]
}

fn embedding_lemma() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (name, m) in multiplier_suite() {
        for (alpha, eps) in [(0.3, 0.1), (0.5, 0.1)] {
            let r = embedding_check(&m, alpha, eps, 2.0, 0.5, (-2, 8), 11, EMBEDDING_CONSTANT)?;
            out.push(
                Check::new(10, format!("embedding {name} alpha={alpha} eps={eps}"), r.pass)
                    .with("ratio", r.ratio)
                    .with("mtilde_norm", r.mtilde_norm)
                    .with("m_norm", r.m_norm),
            );
        }
    }
    Ok(out)
}

fn halfwave_rates() -> Result<Vec<Check>> {
    let grid = GridSpec::default();
    let set = DilationSet::power_sequence(1.0);
    let schedule = TimeSchedule::default();
    let mode = FProfile::Mode { freq: 1.0 }.build(&grid, 0)?;
    let r = halfwave_convergence(&mode, 0.5, 0.4, &set, &schedule)?;
    let mut out = vec![Check::new(11, "halfwave single mode slope", (r.beta_fit - 1.0).abs() <= 0.02)
        .with("beta_fit", r.beta_fit)
        .with("target", 1.0)];
    let g = FProfile::gaussian_bump(1.0).build(&grid, 0)?;
    let r = halfwave_convergence(&g, 0.5, 0.4, &set, &schedule)?;
    out.push(
        Check::new(11, "halfwave gaussian rate", r.beta_fit >= 0.3)
            .with("beta_fit", r.beta_fit)
            .with("target_beta", 0.4),
    );
    Ok(out)
}

/// Smooth test functions of the Hölder–Besov comparison.
pub fn hoelder_suite() -> Vec<(&'static str, fn(f64) -> C)> {
    vec![
        ("gauss", |x| C::new((-x * x).exp(), 0.0)),
        ("sinbump", |x| C::new((PI * x / 2.0).sin() * (-x * x / 4.0).exp(), 0.0)),
        ("xgauss", |x| C::new(x * (-x * x / 2.0).exp(), 0.0)),
        ("bump", |x| {
            C::new(if x.abs() < 2.0 { (-1.0 / (1.0 - x * x / 4.0)).exp() } else { 0.0 }, 0.0)
        }),
        ("cplx", |x| C::from_polar((-x * x / 2.0).exp(), x)),
    ]
}

fn frame_sanity() -> Result<Vec<Check>> {
    let cut = SmoothCutoff::default();
    let mut out = Vec::new();
    let worst = (0..=4000)
        .map(|k| {
            let r = 2f64.powf(-10.0 + 20.0 * k as f64 / 4000.0);
            (cut.partition_sum(r, -12, 12) - 1.0).abs()
        })
        .fold(0.0, f64::max);
    out.push(Check::new(12, "partition of unity", worst <= 1e-12).with("max_error", worst));

    let g = GridFunction::from_fn_1d(1024, 8.0, |x: f64| C::from_polar((-x * x).exp() * (1.0 + x.abs()), 3.0 * x))?;
    let (a, b) = (g.l2_norm(), g.to_frequency().l2_norm());
    let rel = (a - b).abs() / a;
    out.push(Check::new(12, "grid plancherel", rel <= 1e-10).with("relative_error", rel));

    for (name, f) in hoelder_suite() {
        let g = GridFunction::from_fn_1d(4096, 8.0, f)?;
        for (n, sp) in [(0usize, 0.5), (1, 0.5)] {
            let h = hoelder_norm(&g, n, sp)?;
            let bn = besov_norm(&g, &BesovParams::new(f64::INFINITY, n as f64 + sp, 6)?, &cut)?.value;
            let ratio = h / bn;
            out.push(
                Check::new(12, format!("hoelder besov {name} n={n}"), (0.125..=8.0).contains(&ratio))
                    .with("hoelder", h)
                    .with("besov", bn)
                    .with("ratio", ratio),
            );
        }
    }
    for (name, m) in multiplier_suite() {
        for l in 0..=2usize {
            let ws = sigma2_weighted_sobolev(&m, l, (-4, 9))?;
            let s2 = sigma2_norm(&m, &BesovParams::new(2.0, l as f64, 8)?, (-3, 8), &cut)?.value;
            let ratio = ws / s2;
            out.push(
                Check::new(12, format!("weighted sobolev {name} l={l}"), (0.25..=4.0).contains(&ratio))
                    .with("ratio", ratio),
            );
        }
        let rep = dilation_invariance_check(
            &m,
            &[1.37, 0.73],
            &BesovParams::new(2.0, 1.0, 8)?,
            (-3, 8),
            &cut,
            DILATION_CONSTANT,
        )?;
        out.push(Check::new(12, format!("dilation invariance {name}"), rep.pass).with("max_ratio", rep.max_ratio));
    }
    Ok(out)
}

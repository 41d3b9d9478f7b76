//! The three subcommands and their report files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use fracmax_core::dilation::{
    default_delta_schedule, distance_integral_exponent, entropy_number, gap_sum_critical_exponent, kappa,
    minkowski_dimension, BlockSet, DilationSet, DimensionEstimate, EstimateMethod,
};
use fracmax_core::lab::{run_experiment, ExperimentConfig, ExperimentReport, Table};

use crate::checks::{run_suite, Check, Suite};
use crate::{Cli, Command};

/// Whether the verification inside a successful run passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from(pass: bool) -> Self {
        if pass {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

/// Invocation details echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub parallelism: usize,
    /// `--seed`, when given; it replaces the seed of an experiment config.
    #[serde(skip)]
    pub seed_override: Option<u64>,
}

impl RunManifest {
    pub fn new(cli: &Cli) -> Self {
        let (subcommand, config_path) = match &cli.command {
            Command::Dim { config } => ("dim", Some(config.clone())),
            Command::Verify { .. } => ("verify", None),
            Command::Experiment { config } => ("experiment", Some(config.clone())),
        };
        RunManifest {
            subcommand: subcommand.to_string(),
            config_path,
            output_dir: cli.out.clone(),
            seed: cli.seed.unwrap_or(0),
            parallelism: rayon::current_num_threads(),
            seed_override: cli.seed,
        }
    }
}

/// Reads a JSON config; parse errors carry the file, line and column.
fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| {
        anyhow::anyhow!(
            "{}:{}:{}: {}",
            path.display(),
            e.line(),
            e.column(),
            e.to_string().split(" at line ").next().unwrap_or_default()
        )
    })
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s).with_context(|| format!("cannot write {}", path.display()))
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Expected value of the estimate, turning `dim` into an assertion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DimConfig {
    #[serde(rename = "E")]
    pub set: DilationSet,
    pub methods: Vec<EstimateMethod>,
    pub delta_schedule: Vec<f64>,
    /// Blocks entering `κ`, inclusive.
    pub j_range: (i32, i32),
    /// Estimate the dimension of this single block instead of `κ`.
    pub block: Option<i32>,
    /// Exponents `a` of the `δ^a N` columns.
    pub exponents: Vec<f64>,
    /// Terms summed by the gap-sum method.
    pub n_max: u64,
    pub expect: Option<Expectation>,
}

impl Default for DimConfig {
    fn default() -> Self {
        DimConfig {
            set: DilationSet::power_sequence(1.0),
            methods: vec![EstimateMethod::EntropySlope],
            delta_schedule: default_delta_schedule(),
            j_range: (-4, 4),
            block: None,
            exponents: vec![0.3, 0.5, 0.7],
            n_max: 1 << 22,
            expect: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimReport {
    pub manifest: RunManifest,
    pub config: DimConfig,
    pub estimates: Vec<DimensionEstimate<f64>>,
    pub pass: bool,
}

fn dim_blocks(cfg: &DimConfig) -> Result<Vec<BlockSet<f64>>> {
    let js = match cfg.block {
        Some(j) => j..=j,
        None => cfg.j_range.0..=cfg.j_range.1,
    };
    let blocks: Vec<BlockSet<f64>> = js
        .map(|j| cfg.set.rescaled_block(j))
        .collect::<fracmax_core::Result<Vec<_>>>()?
        .into_iter()
        .filter(|b| !b.is_empty())
        .collect();
    if blocks.is_empty() {
        bail!("every block of the set is empty");
    }
    Ok(blocks)
}

fn estimate(cfg: &DimConfig, method: EstimateMethod) -> Result<DimensionEstimate<f64>> {
    let js = cfg.block.map_or(cfg.j_range, |j| (j, j));
    Ok(match method {
        EstimateMethod::EntropySlope => match cfg.block {
            Some(j) => minkowski_dimension(&cfg.set.rescaled_block(j)?, &cfg.delta_schedule)?,
            None => kappa(&cfg.set, &cfg.delta_schedule, cfg.j_range)?,
        },
        EstimateMethod::GapSum => gap_sum_critical_exponent(&cfg.set, cfg.n_max)?,
        EstimateMethod::DistanceIntegral => distance_integral_exponent(&cfg.set, js)?,
    })
}

/// Dimension estimates of `E` with the `(δ, N, δ^a N)` table.
pub fn cmd_dim(config: &Path, manifest: &RunManifest) -> Result<Outcome> {
    let cfg: DimConfig = read_config(config)?;
    cfg.set.validate()?;
    if cfg.methods.is_empty() {
        bail!("methods: at least one estimate method is required");
    }
    if let Some(a) = cfg.exponents.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        bail!("exponents: {a} must lie in (0, 1)");
    }
    let blocks = dim_blocks(&cfg)?;
    let estimates = cfg
        .methods
        .iter()
        .map(|m| estimate(&cfg, *m))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(cfg.delta_schedule.len());
    for d in &cfg.delta_schedule {
        let mut n = 0u64;
        for b in &blocks {
            n = n.max(entropy_number(b, *d)?);
        }
        let mut row = vec![*d, n as f64];
        row.extend(cfg.exponents.iter().map(|a| d.powf(*a) * n as f64));
        rows.push(row);
    }
    let mut header = vec!["delta".to_string(), "N".to_string()];
    header.extend(cfg.exponents.iter().map(|a| format!("delta^{a}*N")));

    let pass = match cfg.expect {
        Some(e) => estimates.iter().all(|est| (est.value - e.value).abs() <= e.tolerance),
        None => true,
    };
    for est in &estimates {
        println!("{:?}: {:.6} (residual {:.3e})", est.method, est.value, est.residual);
    }
    prepare_out(&manifest.output_dir)?;
    write_csv(&manifest.output_dir.join("dim_entropy.csv"), &header, &rows)?;
    write_json(
        &manifest.output_dir.join("dim.json"),
        &DimReport {
            manifest: manifest.clone(),
            config: cfg,
            estimates,
            pass,
        },
    )?;
    Ok(Outcome::from(pass))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub manifest: RunManifest,
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
}

/// Runs a suite and writes `verify_<suite>.json`, plus wall times in
/// `verify_<suite>_timings.csv` (kept out of the report so reruns stay
/// byte-identical).
pub fn cmd_verify(suite: Suite, manifest: &RunManifest) -> Result<Outcome> {
    prepare_out(&manifest.output_dir)?;
    let runs = run_suite(suite, manifest.seed)?;
    let name = serde_json::to_value(suite)?.as_str().unwrap_or("suite").to_string();
    let timings = manifest.output_dir.join(format!("verify_{name}_timings.csv"));
    let mut w = csv::Writer::from_path(&timings).with_context(|| format!("cannot write {}", timings.display()))?;
    w.write_record(["criterion", "check", "seconds"])?;
    for r in &runs {
        w.write_record([r.criterion.to_string(), String::new(), r.seconds.to_string()])?;
        for c in r.checks.iter().filter(|c| c.seconds.is_some()) {
            w.write_record([r.criterion.to_string(), c.name.clone(), c.seconds.unwrap_or_default().to_string()])?;
        }
    }
    w.flush()?;
    let checks: Vec<Check> = runs.into_iter().flat_map(|r| r.checks).collect();
    for c in &checks {
        println!("{} [{}] {}", if c.pass { "PASS" } else { "FAIL" }, c.criterion, c.name);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let report = VerifyReport {
        manifest: manifest.clone(),
        suite,
        passed: checks.len() - failed,
        failed,
        pass: failed == 0,
        checks,
    };
    write_json(&manifest.output_dir.join(format!("verify_{name}.json")), &report)?;
    println!("{} passed, {} failed", report.passed, report.failed);
    Ok(Outcome::from(report.pass))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentOutput {
    pub manifest: RunManifest,
    #[serde(flatten)]
    pub report: ExperimentReport,
}

fn write_table(dir: &Path, t: &Table) -> Result<()> {
    write_csv(&dir.join(format!("{}.csv", t.name)), &t.header, &t.rows)
}

/// Runs one experiment and writes `experiment.json` plus its CSV tables.
pub fn cmd_experiment(config: &Path, manifest: &RunManifest) -> Result<Outcome> {
    let mut cfg: ExperimentConfig = read_config(config)?;
    let mut manifest = manifest.clone();
    if let Some(seed) = manifest.seed_override {
        cfg.seed = seed;
    }
    manifest.seed = cfg.seed;
    cfg.validate()?;
    prepare_out(&manifest.output_dir)?;
    let report = run_experiment(&cfg)?;
    for t in report.tables() {
        write_table(&manifest.output_dir, &t)?;
    }
    let pass = report.pass;
    println!("{:?}: {}", cfg.experiment, if pass { "PASS" } else { "FAIL" });
    write_json(&manifest.output_dir.join("experiment.json"), &ExperimentOutput { manifest, report })?;
    Ok(Outcome::from(pass))
}

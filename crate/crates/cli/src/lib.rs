//! Command-line front end: `dim`, `verify` and `experiment`.
//!
//! Exit codes: 0 when every check passes, 1 on input errors, 2 when a
//! verification fails.

pub mod checks;
pub mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use checks::{Check, CriterionRun, Suite};
pub use commands::{cmd_dim, cmd_experiment, cmd_verify, DimConfig, Expectation, Outcome, RunManifest};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fracmax", version, about = "Maximal multiplier experiments over fractal dilation sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Directory for JSON reports and CSV tables.
    #[arg(long, global = true, default_value = "fracmax-out")]
    pub out: PathBuf,
    /// Seed echoed into every report; overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, env = "FRACMAX_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension estimates of a dilation set.
    Dim {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Run one laboratory experiment.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Parses `args`, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
        }
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be positive");
            return EXIT_INPUT;
        }
        // a pool configured earlier in the process stays in place
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let manifest = RunManifest::new(&cli);
    let result = match &cli.command {
        Command::Dim { config } => cmd_dim(config, &manifest),
        Command::Verify { suite } => cmd_verify(*suite, &manifest),
        Command::Experiment { config } => cmd_experiment(config, &manifest),
    };
    match result {
        Ok(Outcome::Pass) => EXIT_PASS,
        Ok(Outcome::Fail) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INPUT
        }
    }
}

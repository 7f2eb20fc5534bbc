//! Command-line driver for the `weakcumul` library.
//!
//! Subcommands:
//! - `verify <suite>`: runs a verification suite (`core-bound`, `order-lemma`,
//!   `kappa-bound`, `moment-oracle`) and prints a JSON report;
//! - `mmse`: low-degree MMSE lower bounds for the first grid cell (JSON);
//! - `simulate`: one planted instance with its estimates (JSON);
//! - `sweep`: Monte Carlo trials over the parameter grid (CSV).
//!
//! Exit codes: `0` success, `1` verification failure, `2` configuration
//! error, `3` size-limit abort.  See [`config`] for the configuration file.

pub mod config;
pub mod error;
pub mod mmse;
pub mod simulate;
pub mod sweep;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{FileConfig, ModelChoice, Overrides, RunConfig};
use error::{CliResult, EXIT_OK, EXIT_VERIFICATION_FAILED};

/// Top-level command line.
#[derive(Debug, Parser)]
#[command(name = "weakcumul", version, about = "Cumulant bounds, low-degree MMSE bounds and planted-model simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite: core-bound, order-lemma, kappa-bound or moment-oracle.
    Verify {
        suite: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Low-degree MMSE lower bounds for the first grid cell.
    Mmse {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sample one instance and run the selected estimators.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Monte Carlo trials over the parameter grid, as CSV.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Options shared by all subcommands; they override the configuration file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long, short = 'c')]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelChoice>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trials per grid cell.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Comma-separated estimator names.
    #[arg(long, value_delimiter = ',')]
    pub estimator: Option<Vec<String>>,
    /// Output file (default: standard output).
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    /// Polynomial degree D (mmse) or maximal |α| (verify kappa-bound).
    #[arg(long)]
    pub degree: Option<usize>,
    /// Samples for the empirical low-degree fit (mmse; 0 skips it).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Record wall-clock runtimes.
    #[arg(long)]
    pub timing: bool,
    /// Random cases per verification group.
    #[arg(long)]
    pub cases: Option<usize>,
    /// Multiplier applied to checked bounds (0 gives a negative control).
    #[arg(long)]
    pub bound_scale: Option<f64>,
    /// Parameter grid `key=v1,v2,...` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUES")]
    pub set: Vec<String>,
}

impl CommonArgs {
    fn resolve(&self, default_model: Option<ModelChoice>) -> CliResult<RunConfig> {
        let mut file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        if file.model.is_none() {
            file.model = default_model;
        }
        let overrides = Overrides {
            model: self.model,
            seed: self.seed,
            trials: self.trials,
            estimators: self.estimator.clone(),
            output: self.output.clone(),
            degree: self.degree,
            samples: self.samples,
            timing: self.timing,
            cases: self.cases,
            bound_scale: self.bound_scale,
            set: self.set.clone(),
        };
        RunConfig::resolve(file, overrides)
    }
}

fn emit(text: &str, output: &Option<PathBuf>, stdout: &mut impl Write) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, format!("{text}\n"))?,
        None => writeln!(stdout, "{text}")?,
    }
    Ok(())
}

/// Executes a parsed command, writing results to `stdout`; returns the exit code.
pub fn execute(cli: &Cli, stdout: &mut impl Write) -> CliResult<i32> {
    match &cli.command {
        Command::Verify { suite, common } => {
            // Suites carry their own models; a model is only needed to validate the rest.
            let cfg = common.resolve(Some(ModelChoice::Mfm))?;
            let opts = verify::SuiteOptions {
                seed: cfg.seed,
                cases: cfg.cases,
                degree: cfg.degree,
                bound_scale: cfg.bound_scale,
            };
            let report = verify::run_suite(suite, &opts)?;
            emit(&report.to_json(), &cfg.output, stdout)?;
            Ok(if report.passed { EXIT_OK } else { EXIT_VERIFICATION_FAILED })
        }
        Command::Mmse { common } => {
            let cfg = common.resolve(None)?;
            let report = mmse::run_mmse(&cfg)?;
            emit(&serde_json::to_string_pretty(&report).expect("serializable"), &cfg.output, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Simulate { common } => {
            let cfg = common.resolve(None)?;
            let report = simulate::run_simulate(&cfg)?;
            emit(&serde_json::to_string(&report).expect("serializable"), &cfg.output, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Sweep { common } => {
            let cfg = common.resolve(None)?;
            sweep::run_sweep(&cfg, stdout)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args`, runs the command and maps failures to exit codes, printing
/// errors to standard error.
pub fn run_from_args<I, T>(args: I, stdout: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { error::EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("weakcumul: {e}");
            e.exit_code()
        }
    }
}

//! Run configuration: a TOML file merged with command-line overrides.
//!
//! # File format
//!
//! ```toml
//! model = "mfm"            # "mfm" | "seriation" | "clustering"
//! seed = 42                # master seed (default 0)
//! trials = 5               # Monte Carlo trials per grid cell (default 1)
//! estimators = ["exact"]   # default: every estimator of the model
//! output = "sweep.csv"     # default: standard output
//! degree = 2               # polynomial degree D for `mmse`, maximal |α| for `verify kappa-bound`
//! samples = 0              # empirical low-degree samples for `mmse` (0 = skip)
//! timing = false           # record wall-clock runtimes in sweeps
//! cases = 200              # random cases per verification group
//! bound_scale = 1.0        # multiplies the checked bounds (negative controls)
//!
//! [params]                 # each value is a number or a list of numbers
//! k = [4, 8]
//! delta_bar_sq = 4.0
//! ```
//!
//! Parameter keys per model (defaults in parentheses):
//! - `mfm`: `k` (4), `m` (3), `p` (10), `delta_bar_sq` (4), `sigma` (1);
//! - `seriation`: `n` (8), `rho` (2), `lambda` (2), `sigma` (1);
//! - `clustering`: `n` (12), `k` (3), `p` (10), `delta_bar_sq` (4), `sigma` (1).
//!
//! Command-line flags override file values; `--set key=v1,v2` replaces one grid.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;
use weakcumul::lowdeg::ModelParams;
use weakcumul::models::{ClusteringConfig, MfmConfig, SeriationConfig};

use crate::error::{CliError, CliResult};

/// Model family selected by a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Mfm,
    Seriation,
    Clustering,
}

impl ModelChoice {
    /// Name used in CSV rows and reports.
    pub fn name(self) -> &'static str {
        match self {
            ModelChoice::Mfm => "mfm",
            ModelChoice::Seriation => "seriation",
            ModelChoice::Clustering => "clustering",
        }
    }

    /// Parameter keys with their defaults, in CSV column order.
    pub fn parameter_defaults(self) -> &'static [(&'static str, f64)] {
        match self {
            ModelChoice::Mfm => &[("k", 4.0), ("m", 3.0), ("p", 10.0), ("delta_bar_sq", 4.0), ("sigma", 1.0)],
            ModelChoice::Seriation => &[("n", 8.0), ("rho", 2.0), ("lambda", 2.0), ("sigma", 1.0)],
            ModelChoice::Clustering => {
                &[("n", 12.0), ("k", 3.0), ("p", 10.0), ("delta_bar_sq", 4.0), ("sigma", 1.0)]
            }
        }
    }

    fn integer_keys(self) -> &'static [&'static str] {
        match self {
            ModelChoice::Mfm => &["k", "m", "p"],
            ModelChoice::Seriation => &["n", "rho"],
            ModelChoice::Clustering => &["n", "k", "p"],
        }
    }

    /// Estimators available for this model; the first is the default for `simulate`.
    pub fn estimators(self) -> &'static [&'static str] {
        match self {
            ModelChoice::Mfm => &["exact", "alternating"],
            ModelChoice::Seriation => &["threshold", "least-squares"],
            ModelChoice::Clustering => &["balanced-lloyd"],
        }
    }
}

/// A number or a list of numbers in the `[params]` table.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ValueList {
    One(f64),
    Many(Vec<f64>),
}

impl ValueList {
    fn into_vec(self) -> Vec<f64> {
        match self {
            ValueList::One(v) => vec![v],
            ValueList::Many(v) => v,
        }
    }
}

/// Contents of a configuration file; every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<ModelChoice>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub estimators: Option<Vec<String>>,
    pub output: Option<PathBuf>,
    pub degree: Option<usize>,
    pub samples: Option<usize>,
    pub timing: Option<bool>,
    pub cases: Option<usize>,
    pub bound_scale: Option<f64>,
    pub params: Option<BTreeMap<String, ValueList>>,
}

impl FileConfig {
    /// Parses TOML text.
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid configuration file: {e}")))
    }

    /// Reads and parses a TOML file.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Values given on the command line; `None` leaves the file value in place.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub model: Option<ModelChoice>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub estimators: Option<Vec<String>>,
    pub output: Option<PathBuf>,
    pub degree: Option<usize>,
    pub samples: Option<usize>,
    pub timing: bool,
    pub cases: Option<usize>,
    pub bound_scale: Option<f64>,
    /// `key=v1,v2,...` assignments.
    pub set: Vec<String>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelChoice,
    pub seed: u64,
    pub trials: usize,
    pub estimators: Vec<String>,
    pub output: Option<PathBuf>,
    pub degree: Option<usize>,
    pub samples: usize,
    pub timing: bool,
    pub cases: Option<usize>,
    pub bound_scale: f64,
    /// Grid values per parameter key, in [`ModelChoice::parameter_defaults`] order.
    pub grid: Vec<(String, Vec<f64>)>,
}

fn parse_assignment(text: &str) -> CliResult<(String, Vec<f64>)> {
    let (key, values) = text
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("--set expects key=v1,v2,... (got {text:?})")))?;
    let values = values
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| CliError::Config(format!("invalid number {v:?} for {key}"))))
        .collect::<CliResult<Vec<f64>>>()?;
    Ok((key.trim().to_string(), values))
}

impl RunConfig {
    /// Merges a file configuration with overrides (overrides win) and validates it.
    pub fn resolve(file: FileConfig, cli: Overrides) -> CliResult<Self> {
        let model = cli
            .model
            .or(file.model)
            .ok_or_else(|| CliError::Config("no model given (use --model or `model = ...`)".into()))?;
        let mut given: BTreeMap<String, Vec<f64>> =
            file.params.unwrap_or_default().into_iter().map(|(k, v)| (k, v.into_vec())).collect();
        for assignment in &cli.set {
            let (key, values) = parse_assignment(assignment)?;
            given.insert(key, values);
        }
        let defaults = model.parameter_defaults();
        if let Some(unknown) = given.keys().find(|k| !defaults.iter().any(|(d, _)| d == k)) {
            let known: Vec<&str> = defaults.iter().map(|(d, _)| *d).collect();
            return Err(CliError::Config(format!("unknown parameter {unknown:?} for {} (known: {known:?})", model.name())));
        }
        let mut grid = Vec::with_capacity(defaults.len());
        for &(key, default) in defaults {
            let values = given.remove(key).unwrap_or_else(|| vec![default]);
            if values.is_empty() {
                return Err(CliError::Config(format!("parameter grid {key} is empty")));
            }
            for &v in &values {
                if !v.is_finite() || v < 0.0 {
                    return Err(CliError::Config(format!("parameter {key} = {v} must be finite and nonnegative")));
                }
                if model.integer_keys().contains(&key) && v.fract() != 0.0 {
                    return Err(CliError::Config(format!("parameter {key} = {v} must be an integer")));
                }
            }
            grid.push((key.to_string(), values));
        }
        let estimators = cli
            .estimators
            .or(file.estimators)
            .unwrap_or_else(|| model.estimators().iter().map(|s| s.to_string()).collect());
        if estimators.is_empty() {
            return Err(CliError::Config("estimator list is empty".into()));
        }
        if let Some(bad) = estimators.iter().find(|e| !model.estimators().contains(&e.as_str())) {
            return Err(CliError::Config(format!(
                "unknown estimator {bad:?} for {} (available: {:?})",
                model.name(),
                model.estimators()
            )));
        }
        let trials = cli.trials.or(file.trials).unwrap_or(1);
        if trials == 0 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        let bound_scale = cli.bound_scale.or(file.bound_scale).unwrap_or(1.0);
        if !bound_scale.is_finite() || bound_scale < 0.0 {
            return Err(CliError::Config("bound_scale must be finite and nonnegative".into()));
        }
        Ok(RunConfig {
            model,
            seed: cli.seed.or(file.seed).unwrap_or(0),
            trials,
            estimators,
            output: cli.output.or(file.output),
            degree: cli.degree.or(file.degree),
            samples: cli.samples.or(file.samples).unwrap_or(0),
            timing: cli.timing || file.timing.unwrap_or(false),
            cases: cli.cases.or(file.cases),
            bound_scale,
            grid,
        })
    }

    /// Every grid cell (one value per parameter), in lexicographic grid order
    /// with the last parameter varying fastest.
    pub fn cells(&self) -> Vec<Vec<f64>> {
        let mut cells = vec![Vec::new()];
        for (_, values) in &self.grid {
            cells = cells
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut c = prefix.clone();
                        c.push(v);
                        c
                    })
                })
                .collect();
        }
        cells
    }

    /// The first value of every grid (used by single-instance commands).
    pub fn first_cell(&self) -> Vec<f64> {
        self.grid.iter().map(|(_, v)| v[0]).collect()
    }

    /// Parameter names in column order.
    pub fn keys(&self) -> Vec<&str> {
        self.grid.iter().map(|(k, _)| k.as_str()).collect()
    }
}

/// Parameters of one grid cell, converted to the model configurations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellConfig {
    Mfm(MfmConfig),
    Seriation(SeriationConfig),
    Clustering(ClusteringConfig),
}

impl CellConfig {
    /// Builds the configuration of `model` from a cell in column order.
    pub fn new(model: ModelChoice, cell: &[f64]) -> Self {
        let u = |i: usize| cell[i] as usize;
        match model {
            ModelChoice::Mfm => {
                CellConfig::Mfm(MfmConfig { k: u(0), m: u(1), p: u(2), delta_bar_sq: cell[3], sigma: cell[4] })
            }
            ModelChoice::Seriation => {
                CellConfig::Seriation(SeriationConfig { n: u(0), rho: u(1), lambda: cell[2], sigma: cell[3] })
            }
            ModelChoice::Clustering => CellConfig::Clustering(ClusteringConfig {
                n: u(0),
                k: u(1),
                p: u(2),
                delta_bar_sq: cell[3],
                sigma: cell[4],
            }),
        }
    }

    /// Unit-noise parameters for the low-degree computations.
    pub fn model_params(&self) -> CliResult<ModelParams> {
        let params = match *self {
            CellConfig::Mfm(c) => ModelParams::mfm(c.k, c.m, c.p, c.delta_bar_sq / (c.sigma * c.sigma)),
            CellConfig::Seriation(c) => ModelParams::seriation(c.n, c.rho, c.lambda, c.sigma),
            CellConfig::Clustering(c) => ModelParams::clustering(c.n, c.k, c.p, c.delta_bar_sq / (c.sigma * c.sigma)),
        };
        params.map_err(|e| CliError::Config(e.to_string()))
    }
}

//! Monte Carlo sweeps over parameter grids, written as CSV.
//!
//! # CSV schema
//!
//! Header: `model,<parameter keys>,trial,seed,estimator,error,objective,runtime_ms`,
//! with the parameter keys of the model in the order of
//! [`ModelChoice::parameter_defaults`](crate::config::ModelChoice::parameter_defaults).
//! One row per (grid cell, trial, estimator), in that nesting order.
//! `seed` is the instance seed: `derive_seed(master, cell * trials + trial)`;
//! sampling the cell's model with it reproduces the instance exactly.
//! `runtime_ms` is `0` unless timing is enabled.  Numbers use `.` as decimal
//! separator and the shortest round-trip representation; lines end in `\n`.

use std::io::Write;

use rayon::prelude::*;
use weakcumul::models::derive_seed;

use crate::config::{CellConfig, RunConfig};
use crate::error::{CliError, CliResult};
use crate::simulate::{run_estimator, sample_instance, Estimate};

/// Environment variable holding the worker count (default: all cores).
pub const WORKERS_ENV: &str = "WEAKCUMUL_WORKERS";

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub cell: Vec<f64>,
    pub trial: usize,
    pub seed: u64,
    pub estimate: Estimate,
}

fn worker_count() -> CliResult<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{WORKERS_ENV} must be a positive integer (got {v:?})"))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs every (cell, trial) pair on a worker pool; rows come back in
/// deterministic order regardless of completion order.
pub fn sweep_rows(cfg: &RunConfig) -> CliResult<Vec<SweepRow>> {
    let cells = cfg.cells();
    let jobs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..cfg.trials).map(move |t| (c, t))).collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<CliResult<Vec<SweepRow>>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, trial)| {
                let seed = derive_seed(cfg.seed, (c * cfg.trials + trial) as u64);
                let instance = sample_instance(&CellConfig::new(cfg.model, &cells[c]), seed)?;
                cfg.estimators
                    .iter()
                    .map(|name| {
                        let mut estimate = run_estimator(&instance, name)?;
                        if !cfg.timing {
                            estimate.runtime_ms = 0.0;
                        }
                        Ok(SweepRow { cell: cells[c].clone(), trial, seed, estimate })
                    })
                    .collect()
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(jobs.len() * cfg.estimators.len());
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Writes the header and rows as CSV.
pub fn write_csv(cfg: &RunConfig, rows: &[SweepRow], out: impl Write) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header = vec!["model".to_string()];
    header.extend(cfg.keys().iter().map(|k| k.to_string()));
    header.extend(["trial", "seed", "estimator", "error", "objective", "runtime_ms"].map(String::from));
    w.write_record(&header)?;
    for row in rows {
        let mut record = vec![cfg.model.name().to_string()];
        record.extend(row.cell.iter().map(|v| v.to_string()));
        record.push(row.trial.to_string());
        record.push(row.seed.to_string());
        record.push(row.estimate.estimator.clone());
        record.push(row.estimate.error.to_string());
        record.push(row.estimate.objective.to_string());
        record.push(row.estimate.runtime_ms.to_string());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the sweep and writes the CSV to the configured output (or `out`).
pub fn run_sweep(cfg: &RunConfig, out: impl Write) -> CliResult<usize> {
    let rows = sweep_rows(cfg)?;
    match &cfg.output {
        Some(path) => write_csv(cfg, &rows, std::fs::File::create(path)?)?,
        None => write_csv(cfg, &rows, out)?,
    }
    Ok(rows.len())
}

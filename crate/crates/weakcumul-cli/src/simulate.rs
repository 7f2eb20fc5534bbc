//! Single planted instances: sampling, estimation and error evaluation.

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use weakcumul::estimators::{
    balanced_lloyd, kmeans_mfm_alt, kmeans_mfm_exact, ls_seriation, risk, threshold_seriation, AltOptions,
};
use weakcumul::models::{
    derive_seed, err_part, err_perm, rng_from_seed, sample_balanced_seeded, sample_mfm_seeded, sample_seriation_seeded,
    PlantedInstance,
};

use crate::config::{CellConfig, RunConfig};
use crate::error::{CliError, CliResult};

/// Restarts used by the balanced Lloyd estimator.
pub const LLOYD_RESTARTS: usize = 10;

/// Samples the instance of a grid cell determined by `seed`.
pub fn sample_instance(cell: &CellConfig, seed: u64) -> CliResult<PlantedInstance> {
    Ok(match cell {
        CellConfig::Mfm(c) => PlantedInstance::Mfm(sample_mfm_seeded(c, seed)?),
        CellConfig::Seriation(c) => PlantedInstance::Seriation(sample_seriation_seeded(c, seed)?),
        CellConfig::Clustering(c) => PlantedInstance::Clustering(sample_balanced_seeded(c, seed)?),
    })
}

/// An estimate and its quality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub estimator: String,
    /// Estimated latent (or matrix for thresholding), as JSON.
    pub estimate: Value,
    /// `err_perm`, `err_part` or the normalized seriation risk `‖X̂ - X‖²/n²`.
    pub error: f64,
    /// Value of the estimator's objective at the estimate.
    pub objective: f64,
    pub runtime_ms: f64,
}

/// Runs `estimator` on `instance`; randomized estimators draw from a
/// generator seeded with `derive_seed(instance seed, 0)`.
pub fn run_estimator(instance: &PlantedInstance, estimator: &str) -> CliResult<Estimate> {
    let start = Instant::now();
    let mut rng = rng_from_seed(derive_seed(instance.seed().unwrap_or(0), 0));
    let (estimate, error, objective) = match (instance, estimator) {
        (PlantedInstance::Mfm(inst), "exact" | "alternating") => {
            let fit = if estimator == "exact" {
                kmeans_mfm_exact(&inst.y)?
            } else {
                kmeans_mfm_alt(&inst.y, &AltOptions::default(), &mut rng)?
            };
            let error = err_perm(&fit.estimate, &inst.latent)?;
            (serde_json::to_value(&fit.estimate).expect("serializable"), error, fit.objective)
        }
        (PlantedInstance::Seriation(inst), "threshold") => {
            let c = inst.config;
            let x_hat = threshold_seriation(&inst.y, c.lambda)?;
            let objective = inst.y.iter().zip(&x_hat).map(|(a, b)| (a - b) * (a - b)).sum();
            let error = risk(&x_hat, &inst.x, (c.n * c.n) as f64)?;
            (serde_json::to_value(&x_hat).expect("serializable"), error, objective)
        }
        (PlantedInstance::Seriation(inst), "least-squares") => {
            let c = inst.config;
            let fit = ls_seriation(&inst.y, c.n, c.lambda, c.rho)?;
            let error = risk(&fit.estimate.1, &inst.x, (c.n * c.n) as f64)?;
            (serde_json::to_value(&fit.estimate.0).expect("serializable"), error, fit.objective)
        }
        (PlantedInstance::Clustering(inst), "balanced-lloyd") => {
            let c = inst.config;
            let fit = balanced_lloyd(&inst.y, c.n, c.p, c.k, LLOYD_RESTARTS, &mut rng)?;
            let error = err_part(&fit.estimate, &inst.latent, c.k)?;
            (serde_json::to_value(&fit.estimate).expect("serializable"), error, fit.objective)
        }
        (_, other) => return Err(CliError::Config(format!("estimator {other:?} does not apply to this model"))),
    };
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(Estimate { estimator: estimator.to_string(), estimate, error, objective, runtime_ms })
}

/// Output of `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub instance: PlantedInstance,
    pub estimates: Vec<Estimate>,
}

/// Samples the first grid cell at the configured seed and runs every selected estimator.
pub fn run_simulate(cfg: &RunConfig) -> CliResult<SimulationReport> {
    let cell = CellConfig::new(cfg.model, &cfg.first_cell());
    let instance = sample_instance(&cell, cfg.seed)?;
    let estimates = cfg
        .estimators
        .iter()
        .map(|e| {
            let mut est = run_estimator(&instance, e)?;
            if !cfg.timing {
                est.runtime_ms = 0.0;
            }
            Ok(est)
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(SimulationReport { instance, estimates })
}

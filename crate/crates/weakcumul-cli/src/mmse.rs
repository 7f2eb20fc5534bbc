//! Low-degree MMSE report: the exact cumulant bound, the closed-form bound
//! and an optional empirical least-squares fit, side by side.

use serde::Serialize;
use weakcumul::lowdeg::{empirical_lowdeg_mse, sw_bound, theorem_bound, EmpiricalReport, SwReport};
use weakcumul::models::{derive_seed, rng_from_seed};
use weakcumul::Error;

use crate::config::{CellConfig, RunConfig};
use crate::error::CliResult;

/// Default polynomial degree.
pub const DEFAULT_DEGREE: usize = 2;

/// JSON emitted by `mmse`; the cumulant bound's fields are at top level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MmseReport {
    #[serde(flatten)]
    pub sw: SwReport,
    /// Closed-form bound, or `null` when its hypotheses fail.
    pub theorem_bound: Option<f64>,
    /// Why the closed-form bound is unavailable.
    pub theorem_note: Option<String>,
    /// Held-out error of a fitted degree-`D` polynomial (`samples > 0`).
    pub empirical: Option<EmpiricalReport>,
}

/// Evaluates the first grid cell.
pub fn run_mmse(cfg: &RunConfig) -> CliResult<MmseReport> {
    let params = CellConfig::new(cfg.model, &cfg.first_cell()).model_params()?;
    let degree = cfg.degree.unwrap_or(DEFAULT_DEGREE);
    let sw = sw_bound(&params, degree)?;
    let (theorem_bound, theorem_note) = match theorem_bound(&params, degree) {
        Ok(v) => (Some(v), None),
        Err(Error::Precondition(why)) => (None, Some(why)),
        Err(e) => return Err(e.into()),
    };
    let empirical = if cfg.samples > 0 {
        let mut rng = rng_from_seed(derive_seed(cfg.seed, 0));
        Some(empirical_lowdeg_mse(&params, degree, cfg.samples, &mut rng)?)
    } else {
        None
    };
    Ok(MmseReport { sw, theorem_bound, theorem_note, empirical })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{FileConfig, ModelChoice, Overrides};

    fn config(model: ModelChoice, degree: usize, set: &[&str]) -> RunConfig {
        let cli = Overrides {
            model: Some(model),
            degree: Some(degree),
            set: set.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        };
        RunConfig::resolve(FileConfig::default(), cli).unwrap()
    }

    #[test]
    fn degree_zero_is_the_variance() {
        let report = run_mmse(&config(ModelChoice::Clustering, 0, &["n=6", "k=3", "p=2"])).unwrap();
        assert!((report.sw.lower_bound - 0.16).abs() < 1e-12);
        let value: serde_json::Value = serde_json::to_value(&report).unwrap();
        for key in ["model", "params", "D", "lower_bound", "mass_by_degree", "n_terms", "filtered_terms", "theorem_bound"] {
            assert!(value.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn no_signal_has_no_mass() {
        let report = run_mmse(&config(ModelChoice::Mfm, 2, &["k=3", "m=2", "p=1", "delta_bar_sq=0"])).unwrap();
        assert!(report.sw.mass_by_degree.iter().all(|&m| m == 0.0));
    }
}

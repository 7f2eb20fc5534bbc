//! Estimators for the three planted models and their risks.
//!
//! All estimators are deterministic given their input and seed.  Assignment
//! subproblems use [`crate::assignment`], whose ties go to the lowest index.

pub mod clustering;
pub mod matching;
pub mod seriation;

use std::time::Duration;

pub use clustering::{balanced_lloyd, balanced_objective};
pub use matching::{crit_mfm, kmeans_mfm_alt, kmeans_mfm_exact, AltOptions, MAX_EXACT_TUPLES};
pub use seriation::{ls_seriation, threshold_seriation, toeplitz_estimator, MAX_LS_SERIATION_N};

use crate::error::{Error, Result};

/// Output of an estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorResult<T> {
    pub estimate: T,
    /// Value of the estimator's criterion at `estimate`.
    pub objective: f64,
    /// Iterations (alternating methods) or candidates examined (enumeration).
    pub iterations: usize,
    /// Criterion after each iteration of the retained run (iterative methods only).
    pub trace: Vec<f64>,
    /// Wall-clock time.
    pub elapsed: Duration,
}

/// `‖x_hat - x‖²_F / normalization`.
pub fn risk(x_hat: &[f64], x: &[f64], normalization: f64) -> Result<f64> {
    if x_hat.len() != x.len() {
        return Err(Error::Domain(format!("risk: sizes differ ({} vs {})", x_hat.len(), x.len())));
    }
    if !(normalization > 0.0) {
        return Err(Error::Domain("risk: normalization must be positive".into()));
    }
    Ok(x_hat.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / normalization)
}

//! Balanced Lloyd iterations: K-means whose assignment step gives every group
//! exactly `n/K` points (optimal assignment of points to capacity slots).

use std::time::Instant;

use rand::Rng;

use super::EstimatorResult;
use crate::assignment::min_cost_assignment;
use crate::error::{Error, Result};
use crate::models::clustering::balanced_labels;
use crate::models::{derive_seed, rng_from_seed};

const MAX_LLOYD_ITER: usize = 100;

fn means(y: &[f64], p: usize, labels: &[usize], k: usize) -> Vec<f64> {
    let mut centers = vec![0.0; k * p];
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        for j in 0..p {
            centers[l * p + j] += y[i * p + j];
        }
    }
    for l in 0..k {
        for j in 0..p {
            centers[l * p + j] /= counts[l].max(1) as f64;
        }
    }
    centers
}

/// K-means objective `Σ_i ‖y_i - mean(group of i)‖²` of a labelling (`y` is `n x p`).
pub fn balanced_objective(y: &[f64], p: usize, labels: &[usize], k: usize) -> f64 {
    let centers = means(y, p, labels, k);
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| (0..p).map(|j| (y[i * p + j] - centers[l * p + j]).powi(2)).sum::<f64>())
        .sum()
}

fn lloyd_run(y: &[f64], n: usize, p: usize, k: usize, mut labels: Vec<usize>) -> Result<(Vec<usize>, Vec<f64>)> {
    let size = n / k;
    let mut trace = vec![balanced_objective(y, p, &labels, k)];
    for _ in 0..MAX_LLOYD_ITER {
        let centers = means(y, p, &labels, k);
        let mut cost = vec![0.0; n * n];
        for i in 0..n {
            for slot in 0..n {
                let c = slot / size;
                cost[i * n + slot] = (0..p).map(|j| (y[i * p + j] - centers[c * p + j]).powi(2)).sum();
            }
        }
        let assignment = min_cost_assignment(n, &cost)?;
        let next: Vec<usize> = assignment.row_to_col.iter().map(|&slot| slot / size).collect();
        let value = balanced_objective(y, p, &next, k);
        let old = *trace.last().expect("nonempty");
        assert!(value <= old + 1e-12 * old.abs().max(1.0), "balanced Lloyd objective increased: {old} -> {value}");
        let done = next == labels;
        labels = next;
        trace.push(value);
        if done {
            break;
        }
    }
    Ok((labels, trace))
}

/// Best of `restarts` balanced Lloyd runs from uniformly random balanced labellings.
///
/// `y` is `n x p` row-major; `K` must divide `n`.  Run `r` is seeded with a seed
/// derived from a master seed drawn from `rng`; ties keep the earliest run.
pub fn balanced_lloyd(y: &[f64], n: usize, p: usize, k: usize, restarts: usize, rng: &mut impl Rng) -> Result<EstimatorResult<Vec<usize>>> {
    let start = Instant::now();
    if k == 0 || n == 0 || n % k != 0 || y.len() != n * p || restarts == 0 {
        return Err(Error::Domain(format!("balanced_lloyd needs K | n, y of size n*p and restarts >= 1 (n = {n}, K = {k}, p = {p})")));
    }
    let master = rng.next_u64();
    let mut best: Option<(Vec<usize>, Vec<f64>)> = None;
    for r in 0..restarts {
        let init = balanced_labels(n, k, &mut rng_from_seed(derive_seed(master, r as u64)));
        let run = lloyd_run(y, n, p, k, init)?;
        if best.as_ref().is_none_or(|b| run.1.last() < b.1.last()) {
            best = Some(run);
        }
    }
    let (estimate, trace) = best.expect("at least one restart");
    Ok(EstimatorResult {
        objective: *trace.last().expect("nonempty"),
        iterations: trace.len() - 1,
        estimate,
        trace,
        elapsed: start.elapsed(),
    })
}

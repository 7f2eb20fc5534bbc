//! Balanced Gaussian clustering: `n` points, `K` equal-size groups.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{rng_from_seed, standard_normal};
use crate::error::{Error, Result};

/// Parameters of the balanced clustering prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusteringConfig {
    /// Number of points `n` (a multiple of `K`).
    pub n: usize,
    /// Number of groups `K`.
    pub k: usize,
    /// Dimension `p`.
    pub p: usize,
    /// Noise level `σ`.
    pub sigma: f64,
    /// Separation `Δ̄²`; means have per-coordinate variance `λ² = Δ̄² σ² / p`.
    pub delta_bar_sq: f64,
}

impl ClusteringConfig {
    /// Per-coordinate variance `λ²` of the means.
    pub fn lambda_sq(&self) -> f64 {
        self.delta_bar_sq * self.sigma * self.sigma / self.p as f64
    }

    fn validate(&self) -> Result<()> {
        if self.k < 2 || self.p == 0 || self.n == 0 || self.n % self.k != 0 {
            return Err(Error::Config(format!(
                "balanced clustering needs K >= 2, p >= 1 and K | n (got n = {}, K = {}, p = {})",
                self.n, self.k, self.p
            )));
        }
        if !(self.sigma >= 0.0 && self.delta_bar_sq >= 0.0 && self.sigma.is_finite() && self.delta_bar_sq.is_finite()) {
            return Err(Error::Config("sigma and delta_bar_sq must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

/// One draw of the balanced clustering model; `y` is `n x p`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringInstance {
    pub config: ClusteringConfig,
    pub seed: Option<u64>,
    /// Group label of each point; each label appears exactly `n / K` times.
    pub latent: Vec<usize>,
    /// `K` means of dimension `p`.
    pub means: Vec<Vec<f64>>,
    /// Observations.
    pub y: Vec<f64>,
}

/// Uniform balanced labelling by shuffling the multiset with `n / K` copies of each label.
pub fn balanced_labels(n: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..n).map(|i| i / (n / k)).collect();
    labels.shuffle(rng);
    labels
}

/// Samples labels, then means, then noise.
pub fn sample_balanced(cfg: &ClusteringConfig, rng: &mut impl Rng) -> Result<ClusteringInstance> {
    cfg.validate()?;
    let latent = balanced_labels(cfg.n, cfg.k, rng);
    let lambda = cfg.lambda_sq().sqrt();
    let means: Vec<Vec<f64>> = (0..cfg.k)
        .map(|_| (0..cfg.p).map(|_| lambda * standard_normal(rng)).collect())
        .collect();
    let mut y = Vec::with_capacity(cfg.n * cfg.p);
    for &label in &latent {
        for j in 0..cfg.p {
            y.push(means[label][j] + cfg.sigma * standard_normal(rng));
        }
    }
    Ok(ClusteringInstance { config: *cfg, seed: None, latent, means, y })
}

/// [`sample_balanced`] from a seed, recording the seed.
pub fn sample_balanced_seeded(cfg: &ClusteringConfig, seed: u64) -> Result<ClusteringInstance> {
    let mut inst = sample_balanced(cfg, &mut rng_from_seed(seed))?;
    inst.seed = Some(seed);
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_is_balanced() {
        let cfg = ClusteringConfig { n: 12, k: 3, p: 2, sigma: 1.0, delta_bar_sq: 1.0 };
        for seed in 0..50 {
            let inst = sample_balanced_seeded(&cfg, seed).unwrap();
            let mut counts = [0; 3];
            for &l in &inst.latent {
                counts[l] += 1;
            }
            assert_eq!(counts, [4, 4, 4]);
        }
    }

    #[test]
    fn invalid_config() {
        let cfg = ClusteringConfig { n: 10, k: 3, p: 2, sigma: 1.0, delta_bar_sq: 1.0 };
        assert!(matches!(sample_balanced_seeded(&cfg, 0), Err(Error::Config(_))));
    }
}

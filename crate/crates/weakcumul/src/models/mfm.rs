//! Multiple feature matching: `M` datasets, each a permuted copy of `K` means plus noise.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{random_permutation, rng_from_seed, standard_normal};
use crate::error::{Error, Result};

/// Parameters of the feature-matching prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MfmConfig {
    /// Points per dataset `K`.
    pub k: usize,
    /// Number of datasets `M`.
    pub m: usize,
    /// Dimension `p`.
    pub p: usize,
    /// Noise level `σ`.
    pub sigma: f64,
    /// Separation parameter `Δ̄²`; the means have per-coordinate variance `λ² = Δ̄² σ² / p`.
    pub delta_bar_sq: f64,
}

impl MfmConfig {
    /// Per-coordinate variance `λ²` of the means.
    pub fn lambda_sq(&self) -> f64 {
        self.delta_bar_sq * self.sigma * self.sigma / self.p as f64
    }

    fn validate(&self) -> Result<()> {
        if self.k < 2 || self.m < 2 || self.p == 0 {
            return Err(Error::Config(format!(
                "feature matching needs K >= 2, M >= 2, p >= 1 (got K = {}, M = {}, p = {})",
                self.k, self.m, self.p
            )));
        }
        if !(self.sigma >= 0.0 && self.delta_bar_sq >= 0.0 && self.sigma.is_finite() && self.delta_bar_sq.is_finite()) {
            return Err(Error::Config("sigma and delta_bar_sq must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

/// Observations `Y[m][k] in R^p` of the feature-matching model, stored flat:
/// entry `(k, m, j)` lives at `((m * K) + k) * p + j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfmObservations {
    pub k: usize,
    pub m: usize,
    pub p: usize,
    pub data: Vec<f64>,
}

impl MfmObservations {
    /// Point `k` of dataset `m`.
    pub fn point(&self, k: usize, m: usize) -> &[f64] {
        let start = (m * self.k + k) * self.p;
        &self.data[start..start + self.p]
    }

    /// Validates dimensions.
    pub fn new(k: usize, m: usize, p: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != k * m * p {
            return Err(Error::Domain(format!("expected {} entries, got {}", k * m * p, data.len())));
        }
        Ok(Self { k, m, p, data })
    }
}

/// One draw of the feature-matching model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfmInstance {
    pub config: MfmConfig,
    /// Seed the instance was generated from, when known.
    pub seed: Option<u64>,
    /// `latent[m][k] = π_m(k)`: label of point `k` in dataset `m`.
    pub latent: Vec<Vec<usize>>,
    /// `K` means, each of dimension `p`.
    pub means: Vec<Vec<f64>>,
    /// Observations.
    pub y: MfmObservations,
}

/// Samples latent permutations, then means, then noise.
pub fn sample_mfm(cfg: &MfmConfig, rng: &mut impl Rng) -> Result<MfmInstance> {
    cfg.validate()?;
    let latent: Vec<Vec<usize>> = (0..cfg.m).map(|_| random_permutation(cfg.k, rng)).collect();
    let lambda = cfg.lambda_sq().sqrt();
    let means: Vec<Vec<f64>> = (0..cfg.k)
        .map(|_| (0..cfg.p).map(|_| lambda * standard_normal(rng)).collect())
        .collect();
    let mut data = Vec::with_capacity(cfg.k * cfg.m * cfg.p);
    for perm in &latent {
        for &label in perm {
            for j in 0..cfg.p {
                data.push(means[label][j] + cfg.sigma * standard_normal(rng));
            }
        }
    }
    Ok(MfmInstance {
        config: *cfg,
        seed: None,
        latent,
        means,
        y: MfmObservations { k: cfg.k, m: cfg.m, p: cfg.p, data },
    })
}

/// [`sample_mfm`] from a seed, recording the seed in the instance.
pub fn sample_mfm_seeded(cfg: &MfmConfig, seed: u64) -> Result<MfmInstance> {
    let mut inst = sample_mfm(cfg, &mut rng_from_seed(seed))?;
    inst.seed = Some(seed);
    Ok(inst)
}

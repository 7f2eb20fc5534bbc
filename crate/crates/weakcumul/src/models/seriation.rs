//! Seriation: a banded signal matrix observed through a hidden permutation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::{random_permutation, rng_from_seed, standard_normal};
use crate::error::{Error, Result};
use crate::rational::{q, Q};

/// Parameters of the seriation model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriationConfig {
    /// Number of items `n`.
    pub n: usize,
    /// Band half-width `ρ`.
    pub rho: usize,
    /// Signal level `λ`.
    pub lambda: f64,
    /// Noise level (the model normalizes it to `1`).
    pub sigma: f64,
}

impl SeriationConfig {
    fn validate(&self) -> Result<()> {
        if self.n < 2 || self.rho == 0 {
            return Err(Error::Config(format!("seriation needs n >= 2 and rho >= 1 (got n = {}, rho = {})", self.n, self.rho)));
        }
        if !(self.lambda >= 0.0 && self.sigma >= 0.0 && self.lambda.is_finite() && self.sigma.is_finite()) {
            return Err(Error::Config("lambda and sigma must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

/// One draw of the seriation model; matrices are `n x n`, row-major.
///
/// The diagonal of `y` is generated like every other entry but carries no
/// information (`x_ii = λ` always).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriationInstance {
    pub config: SeriationConfig,
    pub seed: Option<u64>,
    /// `latent[i] = π(i)`, the position of item `i`.
    pub latent: Vec<usize>,
    /// Signal `x_ij = λ 1{|π(i) - π(j)| <= ρ}`.
    pub x: Vec<f64>,
    /// Observation `y = x + σ e` with i.i.d. standard Gaussian `e`.
    pub y: Vec<f64>,
}

/// Banded signal matrix `λ 1{|pos(i) - pos(j)| <= ρ}` for positions `pos`.
pub fn band_matrix(positions: &[usize], lambda: f64, rho: usize) -> Vec<f64> {
    let n = positions.len();
    let mut x = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if positions[i].abs_diff(positions[j]) <= rho {
                x[i * n + j] = lambda;
            }
        }
    }
    x
}

/// Samples the permutation, then the noise matrix.
pub fn sample_seriation(cfg: &SeriationConfig, rng: &mut impl Rng) -> Result<SeriationInstance> {
    cfg.validate()?;
    let latent = random_permutation(cfg.n, rng);
    let x = band_matrix(&latent, cfg.lambda, cfg.rho);
    let y = x.iter().map(|v| v + cfg.sigma * standard_normal(rng)).collect();
    Ok(SeriationInstance { config: *cfg, seed: None, latent, x, y })
}

/// [`sample_seriation`] from a seed, recording the seed.
pub fn sample_seriation_seeded(cfg: &SeriationConfig, seed: u64) -> Result<SeriationInstance> {
    let mut inst = sample_seriation(cfg, &mut rng_from_seed(seed))?;
    inst.seed = Some(seed);
    Ok(inst)
}

/// Exact band probability `P(|π(i) - π(j)| <= ρ)` for `i != j`:
/// `(2ρ/(n-1)) (1 - (ρ+1)/(2n))`.
pub fn phi_exact(n: usize, rho: usize) -> Result<Q> {
    if n < 2 || rho == 0 || rho > n - 1 {
        return Err(Error::Domain(format!("phi needs 1 <= rho <= n - 1 (n = {n}, rho = {rho})")));
    }
    let (n, rho) = (n as i64, rho as i64);
    Ok(q(2 * rho) / q(n - 1) * (q(1) - q(rho + 1) / q(2 * n)))
}

/// Floating-point [`phi_exact`].
pub fn phi(n: usize, rho: usize) -> Result<f64> {
    phi_exact(n, rho).map(|v| crate::rational::to_f64(&v))
}

//! Monte Carlo check of the low-degree MMSE: least-squares fit of `x` on all
//! monomials of degree `<= D` in the observations, scored on held-out draws.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::models::{
    derive_seed, rng_from_seed, sample_balanced, sample_mfm, sample_seriation, ClusteringConfig, MfmConfig,
    SeriationConfig,
};
use crate::rational::to_f64;

/// Largest number of monomial features.
pub const MAX_FEATURES: usize = 5000;
/// Bootstrap resamples for the standard error.
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// Held-out mean squared error of the fitted degree-`D` polynomial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalReport {
    pub mse: f64,
    /// Bootstrap standard error of `mse`.
    pub std_error: f64,
    pub features: usize,
    pub n_train: usize,
    pub n_test: usize,
    /// Ratio of smallest to largest pivot of the normal equations.
    pub rcond: f64,
    /// Set when the normal equations are numerically singular (`rcond < 1e-12`).
    pub ill_conditioned: bool,
}

/// Draws one `(x, Y)` pair with unit noise; `Y` is flattened in grid-cell order.
pub fn draw_observation(params: &ModelParams, rng: &mut impl Rng) -> Result<(f64, Vec<f64>)> {
    let lambda_sq = to_f64(&params.lambda_sq());
    match *params {
        ModelParams::Mfm { k, m, p, .. } => {
            let cfg = MfmConfig { k, m, p, sigma: 1.0, delta_bar_sq: lambda_sq * p as f64 };
            let inst = sample_mfm(&cfg, rng)?;
            let x = f64::from(u8::from(inst.latent[0][0] == inst.latent[1][0]));
            Ok((x, inst.y.data))
        }
        ModelParams::Clustering { n, k, p, .. } => {
            let cfg = ClusteringConfig { n, k, p, sigma: 1.0, delta_bar_sq: lambda_sq * p as f64 };
            let inst = sample_balanced(&cfg, rng)?;
            Ok((f64::from(u8::from(inst.latent[0] == inst.latent[1])), inst.y))
        }
        ModelParams::Seriation { n, rho, ref lambda } => {
            let cfg = SeriationConfig { n, rho, lambda: to_f64(lambda), sigma: 1.0 };
            let inst = sample_seriation(&cfg, rng)?;
            Ok((f64::from(u8::from(inst.latent[0].abs_diff(inst.latent[1]) <= rho)), inst.y))
        }
    }
}

/// Monomials of degree `<= D` in `n_vars` variables, as sorted index lists.
pub fn monomials(n_vars: usize, degree: usize) -> Result<Vec<Vec<usize>>> {
    let count: u128 = (0..=degree)
        .map(|d| u128::try_from(crate::rational::binomial((n_vars + d).saturating_sub(1) as u64, d as u64)).unwrap_or(u128::MAX))
        .fold(0u128, |a, b| a.saturating_add(b));
    if count > MAX_FEATURES as u128 {
        return Err(Error::size("monomial features", count, MAX_FEATURES as u128));
    }
    Ok((0..=degree).flat_map(|d| (0..n_vars).combinations_with_replacement(d)).collect())
}

fn features(monos: &[Vec<usize>], y: &[f64]) -> Vec<f64> {
    monos.iter().map(|m| m.iter().map(|&i| y[i]).product()).collect()
}

/// Fits the least-squares degree-`D` polynomial of `x` on `Y` over
/// `n_samples` draws (first half for training, second half held out).
///
/// Each draw uses its own seed derived from a master seed taken from `rng`,
/// so results do not depend on thread scheduling.
pub fn empirical_lowdeg_mse(params: &ModelParams, degree: usize, n_samples: usize, rng: &mut impl Rng) -> Result<EmpiricalReport> {
    params.validate()?;
    let monos = monomials(params.grid().cell_count(), degree)?;
    let f = monos.len();
    if n_samples < 10 * f {
        return Err(Error::Precondition(format!("n_samples >= 10 x features fails ({n_samples} < {})", 10 * f)));
    }
    let master = rng.next_u64();
    let n_train = n_samples / 2;
    let n_test = n_samples - n_train;
    let mut xtx = DMatrix::<f64>::zeros(f, f);
    let mut xty = DVector::<f64>::zeros(f);
    for i in 0..n_train {
        let (x, y) = draw_observation(params, &mut rng_from_seed(derive_seed(master, i as u64)))?;
        let phi = DVector::from_vec(features(&monos, &y));
        xtx.ger(1.0, &phi, &phi, 1.0);
        xty.axpy(x, &phi, 1.0);
    }
    let qr = xtx.clone().col_piv_qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..f).map(|i| r[(i, i)].abs()).collect();
    let max = diag.iter().cloned().fold(0.0, f64::max);
    let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let rcond = if max > 0.0 { min / max } else { 0.0 };
    let ill_conditioned = !(rcond >= 1e-12);
    let coef = match (ill_conditioned, qr.solve(&xty)) {
        (false, Some(c)) => c,
        _ => xtx
            .svd(true, true)
            .solve(&xty, 1e-12 * max.max(f64::MIN_POSITIVE))
            .map_err(|e| Error::Singularity(format!("normal equations: {e}")))?,
    };
    let mut residuals = Vec::with_capacity(n_test);
    for i in n_train..n_samples {
        let (x, y) = draw_observation(params, &mut rng_from_seed(derive_seed(master, i as u64)))?;
        let pred: f64 = features(&monos, &y).iter().zip(coef.iter()).map(|(a, b)| a * b).sum();
        residuals.push((x - pred) * (x - pred));
    }
    let mse = residuals.iter().sum::<f64>() / n_test as f64;
    let mut boot = rng_from_seed(derive_seed(master, u64::MAX));
    let means: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| (0..n_test).map(|_| residuals[boot.random_range(0..n_test)]).sum::<f64>() / n_test as f64)
        .collect();
    let mean_of_means = means.iter().sum::<f64>() / means.len() as f64;
    let var = means.iter().map(|m| (m - mean_of_means).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
    Ok(EmpiricalReport { mse, std_error: var.sqrt(), features: f, n_train, n_test, rcond, ill_conditioned })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qfrac};

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(3, 2).unwrap().len(), 10);
        assert_eq!(monomials(5, 0).unwrap(), vec![Vec::<usize>::new()]);
        assert!(monomials(200, 2).is_err());
    }

    #[test]
    fn degree_zero_is_sample_variance() {
        let params = ModelParams::Mfm { k: 4, m: 2, p: 1, lambda_sq: q(1) };
        let r = empirical_lowdeg_mse(&params, 0, 20_000, &mut rng_from_seed(3)).unwrap();
        assert!((r.mse - 0.1875).abs() < 4.0 * r.std_error + 1e-3, "{r:?}");
        assert!(!r.ill_conditioned);
    }

    #[test]
    fn no_signal_gives_variance() {
        let params = ModelParams::Clustering { n: 4, k: 2, p: 1, lambda_sq: q(0) };
        // E[x] = 1/3 under the balanced prior with n = 4, K = 2.
        let r = empirical_lowdeg_mse(&params, 1, 10_000, &mut rng_from_seed(9)).unwrap();
        let var = 1.0 / 3.0 * 2.0 / 3.0;
        assert!((r.mse - var).abs() < 4.0 * r.std_error + 2e-3, "{r:?}");
    }

    #[test]
    fn at_least_sw_bound() {
        let params = ModelParams::Seriation { n: 4, rho: 1, lambda: qfrac(1, 1) };
        let sw = super::super::sw::sw_bound(&params, 1).unwrap();
        let r = empirical_lowdeg_mse(&params, 1, 10_000, &mut rng_from_seed(1)).unwrap();
        assert!(r.mse >= sw.lower_bound - 4.0 * r.std_error, "{r:?} {}", sw.lower_bound);
    }

    #[test]
    fn too_few_samples() {
        let params = ModelParams::Mfm { k: 4, m: 2, p: 1, lambda_sq: q(1) };
        assert!(matches!(empirical_lowdeg_mse(&params, 1, 50, &mut rng_from_seed(0)), Err(Error::Precondition(_))));
    }
}

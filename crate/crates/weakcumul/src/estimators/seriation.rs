//! Seriation estimators: entrywise thresholding, brute-force least squares,
//! and the half-level band matrix built from an estimated ordering.

use std::time::Instant;

use itertools::Itertools;

use super::EstimatorResult;
use crate::error::{Error, Result};
use crate::models::band_matrix;

/// Largest `n` accepted by [`ls_seriation`].
pub const MAX_LS_SERIATION_N: usize = 10;

fn check_square(y: &[f64], n: usize) -> Result<()> {
    if y.len() != n * n {
        return Err(Error::Domain(format!("expected an {n}x{n} matrix, got {} entries", y.len())));
    }
    Ok(())
}

/// Entrywise `λ 1{Y_ij > λ/2}` (strict inequality).
pub fn threshold_seriation(y: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain("threshold_seriation needs lambda > 0".into()));
    }
    Ok(y.iter().map(|&v| if v > lambda / 2.0 { lambda } else { 0.0 }).collect())
}

/// Least-squares ordering `argmin_π ‖Y - X_π‖²_F` by enumeration (`n <= 10`).
///
/// `π` maps items to positions.  Since `‖X_π‖²` does not depend on `π`, the
/// search maximizes the sum of `Y` over the band of `π`.  A permutation and its
/// reversal give the same band, so only the lexicographically smaller of the
/// two is scored; ties keep the lexicographically first permutation.
/// Returns `(π̂, X_π̂)`; the objective is `‖Y - X_π̂‖²_F`.
pub fn ls_seriation(y: &[f64], n: usize, lambda: f64, rho: usize) -> Result<EstimatorResult<(Vec<usize>, Vec<f64>)>> {
    let start = Instant::now();
    check_square(y, n)?;
    if n > MAX_LS_SERIATION_N {
        return Err(Error::size("least-squares seriation n", n as u128, MAX_LS_SERIATION_N as u128));
    }
    if n == 0 || rho == 0 {
        return Err(Error::Domain("ls_seriation needs n >= 1 and rho >= 1".into()));
    }
    let band_pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (0..n).filter(move |&b| a.abs_diff(b) <= rho).map(move |b| (a, b))).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut examined = 0usize;
    let mut item_at = vec![0usize; n];
    for perm in (0..n).permutations(n) {
        let reversed: Vec<usize> = perm.iter().map(|&p| n - 1 - p).collect();
        if reversed < perm {
            continue;
        }
        examined += 1;
        for (item, &pos) in perm.iter().enumerate() {
            item_at[pos] = item;
        }
        let score: f64 = band_pairs.iter().map(|&(a, b)| y[item_at[a] * n + item_at[b]]).sum();
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, perm));
        }
    }
    let (_, perm) = best.expect("at least one permutation");
    let x = band_matrix(&perm, lambda, rho);
    let objective = y.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(EstimatorResult { estimate: (perm, x), objective, iterations: examined, trace: vec![], elapsed: start.elapsed() })
}

/// `X̂_ij = λ/2` when items `i, j` are within `ρ` in the estimated ordering, else `0`.
///
/// `positions[i]` is the estimated position of item `i` (same convention as the
/// seriation latent).
pub fn toeplitz_estimator(positions: &[usize], lambda: f64, rho: usize) -> Result<Vec<f64>> {
    if rho == 0 {
        return Err(Error::Domain("toeplitz_estimator needs rho >= 1".into()));
    }
    let n = positions.len();
    let mut seen = vec![false; n];
    for &p in positions {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Domain(format!("{positions:?} is not a permutation")));
        }
    }
    Ok(band_matrix(positions, lambda / 2.0, rho))
}

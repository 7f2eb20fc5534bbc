//! Label-invariant error metrics, minimized over a global relabelling `ψ`
//! by an optimal assignment on the `K x K` agreement-count matrix.

use crate::assignment::max_weight_assignment;
use crate::error::{Error, Result};
use crate::rational::{qfrac, Q};

fn check_labels(labels: &[usize], k: usize, what: &str) -> Result<()> {
    match labels.iter().find(|&&l| l >= k) {
        Some(l) => Err(Error::Domain(format!("{what} label {l} outside [0, {k})"))),
        None => Ok(()),
    }
}

/// Maximum over `ψ` of `#{i : ψ(est_i) = truth_i}` for labels in `[0, k)`.
pub fn max_agreement(est: &[usize], truth: &[usize], k: usize) -> Result<usize> {
    if est.len() != truth.len() {
        return Err(Error::Domain(format!("label vectors differ in length ({} vs {})", est.len(), truth.len())));
    }
    if k == 0 {
        return Err(Error::Domain("label count must be positive".into()));
    }
    check_labels(est, k, "estimated")?;
    check_labels(truth, k, "true")?;
    let mut counts = vec![0.0; k * k];
    for (&a, &b) in est.iter().zip(truth) {
        counts[a * k + b] += 1.0;
    }
    let best = max_weight_assignment(k, &counts)?;
    Ok(best.row_to_col.iter().enumerate().map(|(a, &b)| counts[a * k + b] as usize).sum())
}

fn tuple_labels(est: &[Vec<usize>], truth: &[Vec<usize>]) -> Result<(Vec<usize>, Vec<usize>, usize)> {
    if est.len() != truth.len() || est.is_empty() {
        return Err(Error::Domain(format!("tuple sizes differ or are empty ({} vs {})", est.len(), truth.len())));
    }
    let k = truth[0].len();
    for perm in est.iter().chain(truth) {
        if perm.len() != k {
            return Err(Error::Domain("all permutations must have the same length".into()));
        }
        let mut seen = vec![false; k];
        for &v in perm {
            if v >= k || std::mem::replace(&mut seen[v], true) {
                return Err(Error::Domain(format!("{perm:?} is not a permutation of [0, {k})")));
            }
        }
    }
    Ok((est.concat(), truth.concat(), k))
}

/// Exact fraction of mismatched points of a permutation tuple, minimized over global relabellings.
pub fn err_perm_exact(est: &[Vec<usize>], truth: &[Vec<usize>]) -> Result<Q> {
    let (e, t, k) = tuple_labels(est, truth)?;
    let agree = max_agreement(&e, &t, k)?;
    Ok(qfrac((t.len() - agree) as i64, t.len() as i64))
}

/// Floating-point [`err_perm_exact`].
pub fn err_perm(est: &[Vec<usize>], truth: &[Vec<usize>]) -> Result<f64> {
    let (e, t, k) = tuple_labels(est, truth)?;
    let agree = max_agreement(&e, &t, k)?;
    Ok((t.len() - agree) as f64 / t.len() as f64)
}

/// Exact `(1 / 2n) min_ψ Σ_k |G*_k Δ Ĝ_ψ(k)|` for label vectors with labels in `[0, k)`.
pub fn err_part_exact(est: &[usize], truth: &[usize], k: usize) -> Result<Q> {
    let agree = max_agreement(est, truth, k)?;
    if truth.is_empty() {
        return Err(Error::Domain("empty partition".into()));
    }
    Ok(qfrac((truth.len() - agree) as i64, truth.len() as i64))
}

/// Floating-point [`err_part_exact`].
pub fn err_part(est: &[usize], truth: &[usize], k: usize) -> Result<f64> {
    err_part_exact(est, truth, k).map(|v| crate::rational::to_f64(&v))
}

//! Constrained K-means for multiple feature matching.
//!
//! A tuple `perms[m][k] = π_m(k)` assigns point `k` of dataset `m` to cluster
//! `π_m(k)`; each `π_m` is a bijection, so every cluster receives exactly one
//! point per dataset.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::EstimatorResult;
use crate::assignment::min_cost_assignment;
use crate::error::{Error, Result};
use crate::models::{derive_seed, random_permutation, rng_from_seed, MfmObservations};

/// Largest number of gauge-fixed tuples `(K!)^{M-1}` enumerated by [`kmeans_mfm_exact`].
pub const MAX_EXACT_TUPLES: u128 = 10_000_000;

fn check_tuple(y: &MfmObservations, perms: &[Vec<usize>]) -> Result<()> {
    if perms.len() != y.m {
        return Err(Error::Domain(format!("expected {} permutations, got {}", y.m, perms.len())));
    }
    for perm in perms {
        let mut seen = vec![false; y.k];
        if perm.len() != y.k || perm.iter().any(|&c| c >= y.k || std::mem::replace(&mut seen[c], true)) {
            return Err(Error::Domain(format!("{perm:?} is not a permutation of [0, {})", y.k)));
        }
    }
    Ok(())
}

/// `Σ_c Σ_m ‖Y^{(m)}_{π_m^{-1}(c)} - mean_c‖²`, with `mean_c` the average over
/// datasets of the points assigned to cluster `c`.
pub fn crit_mfm(y: &MfmObservations, perms: &[Vec<usize>]) -> Result<f64> {
    check_tuple(y, perms)?;
    let (k, m, p) = (y.k, y.m, y.p);
    let mut sums = vec![0.0; k * p];
    for (ds, perm) in perms.iter().enumerate() {
        for (pt, &c) in perm.iter().enumerate() {
            for (s, v) in sums[c * p..(c + 1) * p].iter_mut().zip(y.point(pt, ds)) {
                *s += v;
            }
        }
    }
    let mut total = 0.0;
    for (ds, perm) in perms.iter().enumerate() {
        for (pt, &c) in perm.iter().enumerate() {
            for (s, v) in sums[c * p..(c + 1) * p].iter().zip(y.point(pt, ds)) {
                let d = v - s / m as f64;
                total += d * d;
            }
        }
    }
    Ok(total)
}

/// Global minimizer of [`crit_mfm`] by enumeration with `π_0 = id`.
///
/// Uses `Crit(π) = Σ ‖y‖² - (1/M) Σ_c ‖S_c‖²` with `S_c` the cluster sums; a
/// depth-first search over datasets maintains `⟨S_c, y⟩` incrementally.
/// Permutations are visited in lexicographic order and only strict
/// improvements replace the incumbent.
pub fn kmeans_mfm_exact(y: &MfmObservations) -> Result<EstimatorResult<Vec<Vec<usize>>>> {
    let start = Instant::now();
    let (k, m, p) = (y.k, y.m, y.p);
    if k == 0 || m == 0 {
        return Err(Error::Domain("empty feature-matching input".into()));
    }
    let per_dataset: u128 = (1..=k as u128).product();
    let tuples = (1..m).try_fold(1u128, |acc, _| acc.checked_mul(per_dataset)).unwrap_or(u128::MAX);
    if tuples > MAX_EXACT_TUPLES {
        return Err(Error::size("gauge-fixed permutation tuples", tuples, MAX_EXACT_TUPLES));
    }
    let all_perms: Vec<Vec<usize>> = itertools::Itertools::permutations(0..k, k).collect();
    let mut sums = vec![0.0; k * p];
    for c in 0..k {
        sums[c * p..(c + 1) * p].copy_from_slice(y.point(c, 0));
    }
    struct Search<'a> {
        y: &'a MfmObservations,
        perms: &'a [Vec<usize>],
        current: Vec<usize>,
        best: Option<(f64, Vec<usize>)>,
        visited: usize,
    }
    fn sq(v: &[f64]) -> f64 {
        v.iter().map(|a| a * a).sum()
    }
    fn rec(s: &mut Search, ds: usize, sums: &mut [f64], value: f64) {
        let (k, m, p) = (s.y.k, s.y.m, s.y.p);
        if ds == m {
            s.visited += 1;
            if s.best.as_ref().is_none_or(|(b, _)| value > *b) {
                s.best = Some((value, s.current.clone()));
            }
            return;
        }
        // gain[c * k + pt] = 2⟨S_c, y_pt⟩ + ‖y_pt‖²: change of Σ‖S_c‖² when point pt joins c.
        let mut gain = vec![0.0; k * k];
        for c in 0..k {
            for pt in 0..k {
                let yp = s.y.point(pt, ds);
                let dot: f64 = sums[c * p..(c + 1) * p].iter().zip(yp).map(|(a, b)| a * b).sum();
                gain[c * k + pt] = 2.0 * dot + sq(yp);
            }
        }
        for idx in 0..s.perms.len() {
            let perm = &s.perms[idx];
            let delta: f64 = perm.iter().enumerate().map(|(pt, &c)| gain[c * k + pt]).sum();
            if ds + 1 == m {
                // Last dataset: the leaf value needs no update of the sums.
                s.visited += 1;
                if s.best.as_ref().is_none_or(|(b, _)| value + delta > *b) {
                    s.current.push(idx);
                    s.best = Some((value + delta, s.current.clone()));
                    s.current.pop();
                }
                continue;
            }
            for (pt, &c) in perm.iter().enumerate() {
                for (a, b) in sums[c * p..(c + 1) * p].iter_mut().zip(s.y.point(pt, ds)) {
                    *a += b;
                }
            }
            s.current.push(idx);
            rec(s, ds + 1, sums, value + delta);
            s.current.pop();
            for (pt, &c) in perm.iter().enumerate() {
                for (a, b) in sums[c * p..(c + 1) * p].iter_mut().zip(s.y.point(pt, ds)) {
                    *a -= b;
                }
            }
        }
    }
    let initial: f64 = (0..k).map(|c| sq(&sums[c * p..(c + 1) * p])).sum();
    let mut search = Search { y, perms: &all_perms, current: Vec::with_capacity(m), best: None, visited: 0 };
    rec(&mut search, 1, &mut sums, initial);
    let (_, choice) = search.best.expect("at least one tuple");
    let mut estimate = vec![(0..k).collect::<Vec<usize>>()];
    estimate.extend(choice.iter().map(|&i| all_perms[i].clone()));
    let objective = crit_mfm(y, &estimate)?;
    Ok(EstimatorResult { estimate, objective, iterations: search.visited, trace: vec![], elapsed: start.elapsed() })
}

/// Settings of [`kmeans_mfm_alt`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AltOptions {
    /// Number of starts (the first uses dataset 0 as initial centers).
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop when the relative decrease of the criterion falls below `tol`.
    pub tol: f64,
}

impl Default for AltOptions {
    fn default() -> Self {
        Self { restarts: 10, max_iter: 100, tol: 1e-10 }
    }
}

fn assign_to_centers(y: &MfmObservations, ds: usize, centers: &[f64]) -> Result<Vec<usize>> {
    let (k, p) = (y.k, y.p);
    let mut cost = vec![0.0; k * k];
    for pt in 0..k {
        let yp = y.point(pt, ds);
        for c in 0..k {
            cost[pt * k + c] = yp.iter().zip(&centers[c * p..(c + 1) * p]).map(|(a, b)| (a - b) * (a - b)).sum();
        }
    }
    Ok(min_cost_assignment(k, &cost)?.row_to_col)
}

fn cluster_means(y: &MfmObservations, perms: &[Vec<usize>]) -> Vec<f64> {
    let (k, m, p) = (y.k, y.m, y.p);
    let mut centers = vec![0.0; k * p];
    for (ds, perm) in perms.iter().enumerate() {
        for (pt, &c) in perm.iter().enumerate() {
            for (s, v) in centers[c * p..(c + 1) * p].iter_mut().zip(y.point(pt, ds)) {
                *s += v / m as f64;
            }
        }
    }
    centers
}

fn alternate(y: &MfmObservations, mut perms: Vec<Vec<usize>>, opts: &AltOptions) -> Result<(Vec<Vec<usize>>, Vec<f64>)> {
    let mut trace = vec![crit_mfm(y, &perms)?];
    for _ in 0..opts.max_iter {
        let centers = cluster_means(y, &perms);
        let next: Vec<Vec<usize>> = (0..y.m).map(|ds| assign_to_centers(y, ds, &centers)).collect::<Result<_>>()?;
        let old = *trace.last().expect("nonempty");
        let new = crit_mfm(y, &next)?;
        assert!(new <= old + 1e-12 * old.abs().max(1.0), "alternating criterion increased: {old} -> {new}");
        perms = next;
        trace.push(new);
        if old <= 0.0 || (old - new) / old < opts.tol {
            break;
        }
    }
    Ok((perms, trace))
}

/// Alternating minimization of [`crit_mfm`]: cluster means, then a per-dataset
/// optimal assignment of points to means; best of `restarts` runs.
///
/// Run 0 starts from the points of dataset 0 as centers; the other runs start
/// from uniformly random tuples drawn with seeds derived from a master seed
/// taken from `rng`.  Ties between runs keep the earliest run.
pub fn kmeans_mfm_alt(y: &MfmObservations, opts: &AltOptions, rng: &mut impl Rng) -> Result<EstimatorResult<Vec<Vec<usize>>>> {
    let start = Instant::now();
    if y.k == 0 || y.m == 0 || opts.restarts == 0 {
        return Err(Error::Domain("kmeans_mfm_alt needs K, M, restarts >= 1".into()));
    }
    let master = rng.next_u64();
    let runs: Vec<Result<(Vec<Vec<usize>>, Vec<f64>)>> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let init: Vec<Vec<usize>> = if r == 0 {
                let centers: Vec<f64> = (0..y.k).flat_map(|c| y.point(c, 0).to_vec()).collect();
                (0..y.m).map(|ds| assign_to_centers(y, ds, &centers)).collect::<Result<_>>()?
            } else {
                let mut local = rng_from_seed(derive_seed(master, r as u64));
                (0..y.m).map(|_| random_permutation(y.k, &mut local)).collect()
            };
            alternate(y, init, opts)
        })
        .collect();
    let mut best: Option<(Vec<Vec<usize>>, Vec<f64>)> = None;
    for run in runs {
        let run = run?;
        let value = *run.1.last().expect("nonempty trace");
        if best.as_ref().is_none_or(|b| value < *b.1.last().expect("nonempty trace")) {
            best = Some(run);
        }
    }
    let (estimate, trace) = best.expect("at least one restart");
    Ok(EstimatorResult {
        objective: *trace.last().expect("nonempty trace"),
        iterations: trace.len() - 1,
        estimate,
        trace,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{err_perm, sample_mfm_seeded, MfmConfig};

    #[test]
    fn crit_examples() {
        // Two datasets with identical points: matching them gives 0.
        let y = MfmObservations::new(2, 2, 1, vec![1.0, 3.0, 1.0, 3.0]).unwrap();
        assert_eq!(crit_mfm(&y, &[vec![0, 1], vec![0, 1]]).unwrap(), 0.0);
        // Crossed: clusters {1, 3} twice, each with within-variance 2 * 1² = 2.
        assert_eq!(crit_mfm(&y, &[vec![0, 1], vec![1, 0]]).unwrap(), 4.0);
        // Hand instance in dimension 2.
        let y = MfmObservations::new(2, 2, 2, vec![0.0, 0.0, 2.0, 2.0, 1.0, 0.0, 2.0, 4.0]).unwrap();
        // Cluster 0: (0,0),(1,0) -> 2 * 0.25; cluster 1: (2,2),(2,4) -> 2 * 1.
        assert_eq!(crit_mfm(&y, &[vec![0, 1], vec![0, 1]]).unwrap(), 2.5);
        assert_eq!(
            crit_mfm(&y, &[vec![0, 1], vec![0, 1]]).unwrap(),
            crit_mfm(&y, &[vec![1, 0], vec![1, 0]]).unwrap()
        );
        assert!(crit_mfm(&y, &[vec![0, 0], vec![0, 1]]).is_err());
    }

    /// Observations equal to the permuted means (noise removed).
    fn noiseless(inst: &crate::models::MfmInstance) -> MfmObservations {
        let data = inst.latent.iter().flat_map(|perm| perm.iter().flat_map(|&c| inst.means[c].clone())).collect();
        MfmObservations::new(inst.config.k, inst.config.m, inst.config.p, data).unwrap()
    }

    #[test]
    fn exact_recovers_noiseless() {
        let cfg = MfmConfig { k: 4, m: 3, p: 3, sigma: 1.0, delta_bar_sq: 5.0 };
        let inst = sample_mfm_seeded(&cfg, 8).unwrap();
        let y = noiseless(&inst);
        let r = kmeans_mfm_exact(&y).unwrap();
        assert_eq!(err_perm(&r.estimate, &inst.latent).unwrap(), 0.0);
        assert!(r.objective.abs() < 1e-12);
        assert_eq!(r.objective, crit_mfm(&y, &r.estimate).unwrap());
        assert_eq!(r.iterations, 24 * 24);
    }

    #[test]
    fn exact_beats_random_tuples() {
        let cfg = MfmConfig { k: 3, m: 3, p: 2, sigma: 1.0, delta_bar_sq: 2.0 };
        let inst = sample_mfm_seeded(&cfg, 21).unwrap();
        let r = kmeans_mfm_exact(&inst.y).unwrap();
        let mut rng = rng_from_seed(5);
        for _ in 0..100 {
            let perms: Vec<Vec<usize>> = (0..3).map(|_| random_permutation(3, &mut rng)).collect();
            assert!(r.objective <= crit_mfm(&inst.y, &perms).unwrap() + 1e-12);
        }
        assert!(r.objective <= crit_mfm(&inst.y, &inst.latent).unwrap() + 1e-12);
    }

    #[test]
    fn exact_cap() {
        let y = MfmObservations::new(6, 4, 1, vec![0.0; 24]).unwrap();
        assert!(matches!(kmeans_mfm_exact(&y), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn alternating_noiseless_and_monotone() {
        let cfg = MfmConfig { k: 5, m: 3, p: 4, sigma: 1.0, delta_bar_sq: 8.0 };
        let inst = sample_mfm_seeded(&cfg, 2).unwrap();
        let r = kmeans_mfm_alt(&noiseless(&inst), &AltOptions::default(), &mut rng_from_seed(0)).unwrap();
        assert!(r.objective < 1e-12);
        assert_eq!(err_perm(&r.estimate, &inst.latent).unwrap(), 0.0);
        let cfg = MfmConfig { k: 6, m: 4, p: 3, sigma: 1.0, delta_bar_sq: 1.0 };
        let inst = sample_mfm_seeded(&cfg, 3).unwrap();
        let r = kmeans_mfm_alt(&inst.y, &AltOptions::default(), &mut rng_from_seed(1)).unwrap();
        assert!(r.trace.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0]));
        let again = kmeans_mfm_alt(&inst.y, &AltOptions::default(), &mut rng_from_seed(1)).unwrap();
        assert_eq!(r.estimate, again.estimate);
    }
}

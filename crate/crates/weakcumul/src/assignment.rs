//! Exact linear assignment (Hungarian algorithm with potentials) on `f64` costs.
//!
//! Shared by the error metrics, the alternating matcher and the balanced
//! clustering step.  Ties are resolved deterministically: when several
//! columns attain the same reduced cost, the lowest column index is chosen.

use crate::error::{Error, Result};

/// Solution of a square assignment problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// `row_to_col[i]` is the column assigned to row `i`.
    pub row_to_col: Vec<usize>,
    /// Total cost of the assignment.
    pub cost: f64,
}

/// Minimum-cost perfect matching of an `n x n` cost matrix given row-major.
pub fn min_cost_assignment(n: usize, cost: &[f64]) -> Result<Assignment> {
    if cost.len() != n * n {
        return Err(Error::Domain(format!("cost matrix has {} entries, expected {}", cost.len(), n * n)));
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain("assignment costs must be finite".into()));
    }
    if n == 0 {
        return Ok(Assignment { row_to_col: Vec::new(), cost: 0.0 });
    }
    // 1-based potentials formulation; column 0 is a virtual column.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1]; // p[j] = row matched to column j
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        row_to_col[p[j] - 1] = j - 1;
    }
    let total = row_to_col.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum();
    Ok(Assignment { row_to_col, cost: total })
}

/// Maximum-weight perfect matching of an `n x n` weight matrix given row-major.
pub fn max_weight_assignment(n: usize, weight: &[f64]) -> Result<Assignment> {
    let neg: Vec<f64> = weight.iter().map(|w| -w).collect();
    let mut a = min_cost_assignment(n, &neg)?;
    a.cost = -a.cost;
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force(n: usize, cost: &[f64]) -> f64 {
        fn rec(i: usize, n: usize, used: &mut Vec<bool>, cost: &[f64]) -> f64 {
            if i == n {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..n {
                if !used[j] {
                    used[j] = true;
                    best = best.min(cost[i * n + j] + rec(i + 1, n, used, cost));
                    used[j] = false;
                }
            }
            best
        }
        rec(0, n, &mut vec![false; n], cost)
    }

    #[test]
    fn small_example() {
        let cost = [4.0, 1.0, 3.0, 2.0, 0.0, 5.0, 3.0, 2.0, 2.0];
        let a = min_cost_assignment(3, &cost).unwrap();
        assert_eq!(a.cost, 5.0);
        assert_eq!(a.row_to_col, vec![1, 0, 2]);
        let w = max_weight_assignment(2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!((w.row_to_col, w.cost), (vec![0, 1], 2.0));
    }

    #[test]
    fn ties_are_deterministic() {
        let a = min_cost_assignment(3, &[0.0; 9]).unwrap();
        assert_eq!(a, min_cost_assignment(3, &[0.0; 9]).unwrap());
        let mut cols = a.row_to_col.clone();
        cols.sort_unstable();
        assert_eq!(cols, vec![0, 1, 2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(min_cost_assignment(2, &[1.0; 3]).is_err());
        assert!(min_cost_assignment(1, &[f64::NAN]).is_err());
    }

    proptest! {
        #[test]
        fn matches_brute_force(n in 1usize..7, seed in prop::collection::vec(-10i32..10, 36)) {
            let cost: Vec<f64> = seed.iter().take(n * n).map(|&c| c as f64).collect();
            let a = min_cost_assignment(n, &cost).unwrap();
            prop_assert_eq!(a.cost, brute_force(n, &cost));
            let mut cols = a.row_to_col.clone();
            cols.sort_unstable();
            prop_assert_eq!(cols, (0..n).collect::<Vec<_>>());
        }
    }
}

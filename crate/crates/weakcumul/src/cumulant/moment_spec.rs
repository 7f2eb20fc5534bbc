//! Quasi-factorized mixed moments and the general cumulant bound.
//!
//! A [`MomentSpec`] describes `l` random variables `Z_1, ..., Z_l`, each the
//! indicator attached to a set `I_t` of items, whose mixed moments have the
//! closed form
//!
//! ```text
//! E[prod_{t in Δ} Z_t] = η^{|I_Δ|} · prod_j prod_{a < |I_Δ ∩ A_j|} (1 - a x0)^{-1}
//!                                   · prod_i prod_{b < |I_Δ ∩ B_i|} (1 - b y0)
//! ```
//!
//! with `I_Δ = ∪_{t in Δ} I_t`.  Uniform permutations (one `A` set) and
//! balanced labellings (sampling without replacement, `B` sets) are both of
//! this form.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::oracle::{joint_cumulant, MomentTable, MAX_CUMULANT_ORDER};
use crate::error::{Error, Result};
use crate::rational::{ln, q, Q};

/// Largest admissible `L = |∪ I_t|`.
pub const MAX_SPEC_ITEMS: usize = 64;

/// Parameters `(η, x0, y0, {I_t}, {A_j}, {B_i})` of a quasi-factorized moment family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSpec {
    #[serde(serialize_with = "ser_q")]
    eta: Q,
    #[serde(serialize_with = "ser_q")]
    x0: Q,
    #[serde(serialize_with = "ser_q")]
    y0: Q,
    i_sets: Vec<Vec<usize>>,
    a_sets: Vec<Vec<usize>>,
    b_sets: Vec<Vec<usize>>,
}

fn ser_q<S: serde::Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn normalize_family(name: &str, family: Vec<Vec<usize>>) -> Result<Vec<Vec<usize>>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(family.len());
    for set in family {
        let s: BTreeSet<usize> = set.into_iter().collect();
        for &v in &s {
            if !seen.insert(v) {
                return Err(Error::Domain(format!("{name} sets are not pairwise disjoint (item {v})")));
            }
        }
        out.push(s.into_iter().collect());
    }
    Ok(out)
}

impl MomentSpec {
    /// Validates and builds a spec.
    pub fn new(
        eta: Q,
        x0: Q,
        y0: Q,
        i_sets: Vec<Vec<usize>>,
        a_sets: Vec<Vec<usize>>,
        b_sets: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if !(eta.is_positive() && eta <= Q::one()) {
            return Err(Error::Domain(format!("eta = {eta} outside (0, 1]")));
        }
        if x0.is_negative() || y0.is_negative() {
            return Err(Error::Domain("x0 and y0 must be nonnegative".into()));
        }
        let i_sets = normalize_family("I", i_sets)?;
        let a_sets = normalize_family("A", a_sets)?;
        let b_sets = normalize_family("B", b_sets)?;
        if i_sets.is_empty() || i_sets.len() > MAX_CUMULANT_ORDER {
            return Err(Error::size("number of I sets", i_sets.len() as u128, MAX_CUMULANT_ORDER as u128));
        }
        let big_l: usize = i_sets.iter().map(Vec::len).sum();
        if big_l > MAX_SPEC_ITEMS {
            return Err(Error::size("L = |union of I sets|", big_l as u128, MAX_SPEC_ITEMS as u128));
        }
        Ok(Self { eta, x0, y0, i_sets, a_sets, b_sets })
    }

    /// `η`.
    pub fn eta(&self) -> &Q {
        &self.eta
    }
    /// `x0`.
    pub fn x0(&self) -> &Q {
        &self.x0
    }
    /// `y0`.
    pub fn y0(&self) -> &Q {
        &self.y0
    }
    /// The sets `I_t`.
    pub fn i_sets(&self) -> &[Vec<usize>] {
        &self.i_sets
    }
    /// The sets `A_j`.
    pub fn a_sets(&self) -> &[Vec<usize>] {
        &self.a_sets
    }
    /// The sets `B_i`.
    pub fn b_sets(&self) -> &[Vec<usize>] {
        &self.b_sets
    }
    /// Number of variables `l`.
    pub fn ell(&self) -> usize {
        self.i_sets.len()
    }
    /// `L = |∪ I_t|`.
    pub fn big_l(&self) -> usize {
        self.i_sets.iter().map(Vec::len).sum()
    }
    /// Number of `A` sets `q`.
    pub fn q(&self) -> usize {
        self.a_sets.len()
    }
    /// Number of `B` sets `r`.
    pub fn r(&self) -> usize {
        self.b_sets.len()
    }

    /// `I_Δ` for a subset `Δ` of variables (bitmask).
    pub fn i_delta(&self, delta: u32) -> BTreeSet<usize> {
        self.i_sets
            .iter()
            .enumerate()
            .filter(|(t, _)| delta & (1 << t) != 0)
            .flat_map(|(_, s)| s.iter().copied())
            .collect()
    }

    /// For each `A_j`, `|I_Δ ∩ A_j|`; likewise for `B_i`.
    pub fn intersection_counts(&self, delta: u32) -> (Vec<usize>, Vec<usize>) {
        let id = self.i_delta(delta);
        let count = |s: &Vec<usize>| s.iter().filter(|v| id.contains(v)).count();
        (self.a_sets.iter().map(count).collect(), self.b_sets.iter().map(count).collect())
    }

    /// Exact closed-form mixed moment for the subset `Δ` (bitmask).
    pub fn mixed_moment(&self, delta: u32) -> Result<Q> {
        let id_len = self.i_delta(delta).len();
        let (a_counts, b_counts) = self.intersection_counts(delta);
        let mut v = num_traits::pow(self.eta.clone(), id_len);
        for c in a_counts {
            for a in 0..c {
                let den = Q::one() - q(a as i64) * &self.x0;
                if !den.is_positive() {
                    return Err(Error::Singularity(format!("1 - {a}·x0 = {den} is not positive")));
                }
                v /= den;
            }
        }
        for c in b_counts {
            for b in 0..c {
                v *= Q::one() - q(b as i64) * &self.y0;
            }
        }
        Ok(v)
    }

    /// Table of all mixed moments of the `l` variables.
    pub fn moment_table(&self) -> Result<MomentTable<Q>> {
        MomentTable::try_from_fn(self.ell(), |m| self.mixed_moment(m))
    }

    /// Exact joint cumulant of the `l` variables.
    pub fn exact_cumulant(&self) -> Result<Q> {
        joint_cumulant(&self.moment_table()?)
    }

    /// Components of the graph on `[l]` with an edge `(t, t')` whenever some
    /// `B_i` meets both `I_t` and `I_t'` (isolated vertices count).
    pub fn b_graph_components(&self) -> usize {
        let l = self.ell();
        let mut uf = UnionFind::<usize>::new(l);
        for b in &self.b_sets {
            let touching: Vec<usize> = (0..l)
                .filter(|&t| self.i_sets[t].iter().any(|v| b.binary_search(v).is_ok()))
                .collect();
            for w in touching.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        uf.into_labeling().into_iter().collect::<BTreeSet<_>>().len()
    }

    /// Upper bound on `|cumulant|` for quasi-factorized moments.
    ///
    /// With `r >= 1` (requires `2 L² y0 <= 1` and `2 x0 <= y0`):
    /// `4 l^{2l} η^L (L² y0)^{l-1} (x0/y0)^{cc(B)-1}`.
    /// With `r = 0` (requires `2 L² x0 <= 1`): `2 l^{2l} η^L (L² x0)^{l-1}`.
    /// Specs outside these hypotheses are refused.
    pub fn core_bound(&self) -> Result<f64> {
        let l = self.ell() as i64;
        let big_l = self.big_l() as i64;
        let l2 = q(big_l * big_l);
        let two = q(2);
        let (lead, base) = if self.r() >= 1 {
            if &two * &l2 * &self.y0 > Q::one() {
                return Err(Error::Precondition(format!(
                    "2·L²·y0 <= 1 fails (L = {big_l}, y0 = {})",
                    self.y0
                )));
            }
            if &two * &self.x0 > self.y0 {
                return Err(Error::Precondition(format!(
                    "2·x0 <= y0 fails (x0 = {}, y0 = {})",
                    self.x0, self.y0
                )));
            }
            (4.0f64, &self.y0)
        } else {
            if &two * &l2 * &self.x0 > Q::one() {
                return Err(Error::Precondition(format!(
                    "2·L²·x0 <= 1 fails (L = {big_l}, x0 = {})",
                    self.x0
                )));
            }
            (2.0f64, &self.x0)
        };
        let mut log = lead.ln() + 2.0 * (l as f64) * (l as f64).ln() + big_l as f64 * ln(&self.eta);
        if l >= 2 {
            if base.is_zero() {
                return Ok(0.0);
            }
            log += (l - 1) as f64 * ln(&(l2 * base));
        }
        if self.r() >= 1 {
            let cc = self.b_graph_components() as i64;
            if cc > 1 {
                if self.x0.is_zero() {
                    return Ok(0.0);
                }
                log += (cc - 1) as f64 * (ln(&self.x0) - ln(&self.y0));
            }
        }
        Ok(log.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qfrac;

    #[test]
    fn moment_examples() {
        let perm = MomentSpec::new(qfrac(1, 4), qfrac(1, 4), q(0), vec![vec![0], vec![1]], vec![vec![0, 1, 2, 3]], vec![])
            .unwrap();
        assert_eq!(perm.mixed_moment(0).unwrap(), q(1));
        assert_eq!(perm.mixed_moment(0b11).unwrap(), qfrac(1, 12));
        let balanced =
            MomentSpec::new(qfrac(1, 3), qfrac(1, 6), qfrac(3, 6), vec![vec![0], vec![1]], vec![vec![0, 1, 2, 3, 4, 5]], vec![vec![0, 1]])
                .unwrap();
        assert_eq!(balanced.mixed_moment(0b11).unwrap(), qfrac(1, 15));
    }

    #[test]
    fn singular_moment() {
        let s = MomentSpec::new(q(1), q(1), q(0), vec![vec![0, 1, 2]], vec![vec![0, 1, 2]], vec![]).unwrap();
        assert!(matches!(s.mixed_moment(1), Err(Error::Singularity(_))));
    }

    #[test]
    fn core_bound_examples() {
        let s = MomentSpec::new(qfrac(1, 4), qfrac(1, 100), q(0), vec![vec![0, 1]], vec![], vec![]).unwrap();
        assert!((s.core_bound().unwrap() - 0.125).abs() < 1e-15);
        let s = MomentSpec::new(qfrac(1, 100), qfrac(1, 100), q(0), vec![vec![0], vec![1]], vec![vec![0, 1]], vec![])
            .unwrap();
        let b = s.core_bound().unwrap();
        assert!((b - 1.28e-4).abs() < 1e-15);
        let exact = crate::rational::to_f64(&s.exact_cumulant().unwrap());
        assert!((exact - 1.0 / (100.0 * 100.0 * 99.0)).abs() < 1e-18);
        assert!(exact.abs() <= b);
        let s = MomentSpec::new(qfrac(1, 2), qfrac(1, 100), qfrac(1, 50), vec![vec![0], vec![1]], vec![], vec![vec![0, 1]])
            .unwrap();
        assert_eq!(s.b_graph_components(), 1);
    }

    #[test]
    fn core_bound_preconditions() {
        let s = MomentSpec::new(q(1), qfrac(1, 2), q(0), vec![vec![0], vec![1]], vec![vec![0, 1]], vec![]).unwrap();
        assert!(matches!(s.core_bound(), Err(Error::Precondition(m)) if m.contains("2·L²·x0")));
        let s = MomentSpec::new(q(1), qfrac(1, 10), qfrac(1, 100), vec![vec![0]], vec![], vec![vec![0]]).unwrap();
        assert!(matches!(s.core_bound(), Err(Error::Precondition(m)) if m.contains("2·x0 <= y0")));
    }

    #[test]
    fn invalid_specs() {
        assert!(MomentSpec::new(q(2), q(0), q(0), vec![vec![0]], vec![], vec![]).is_err());
        assert!(MomentSpec::new(q(1), q(0), q(0), vec![vec![0], vec![0]], vec![], vec![]).is_err());
        assert!(MomentSpec::new(q(1), q(0), q(0), vec![(0..65).collect()], vec![], vec![]).is_err());
    }
}

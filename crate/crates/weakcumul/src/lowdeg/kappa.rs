//! Exact cumulants `κ_{x,α} = cumul(x, X_α)`, nullity rules, and closed-form bounds.
//!
//! For the Gaussian-means models (feature matching, clustering) the observation
//! entries are centered Gaussians given the latent labels, with conditional
//! covariance `λ² 1{same column} 1{same label}`.  The law of total cumulance
//! then gives
//! `κ_{x,α} = λ^{|α|} Σ_P cumul(x, (1{label(a) = label(b)})_{(a,b) ∈ P})`,
//! the sum running over pairings `P` of the positions of `α` whose pairs share a
//! column.  For seriation the signal entries are `λ` times band indicators and
//! `κ_{x,α} = λ^{|α|} cumul(x, (1{|π(i) - π(j)| <= ρ})_{(i,j) ∈ α})`.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use num_traits::Zero;

use super::params::ModelParams;
use crate::combinatorics::{alpha_summary, Cell, GridKind, MultiIndex};
use crate::cumulant::{joint_cumulant, MomentTable};
use crate::error::{Error, Result};
use crate::models::{latent_moment, Constraint, LatentModel};
use crate::rational::Q;

/// Largest `|α|` for which `κ_{x,α}` is computed exactly.
pub const MAX_KAPPA_DEGREE: usize = 8;

/// Thread-safe cache of exact latent moments, keyed by a relabelled constraint list.
///
/// Keys are invariant under the exchangeability of the prior (items for the
/// permutation and balanced priors; datasets and points within a dataset for
/// the multi-permutation prior), so moments of isomorphic events are shared.
#[derive(Debug)]
pub struct MomentCache {
    model: LatentModel,
    map: RwLock<HashMap<Vec<Constraint>, Q>>,
}

impl MomentCache {
    /// Empty cache for a prior.
    pub fn new(model: LatentModel) -> Self {
        Self { model, map: RwLock::new(HashMap::new()) }
    }

    /// The prior.
    pub fn model(&self) -> LatentModel {
        self.model
    }

    /// Number of cached entries.
    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    /// `true` when nothing is cached.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Probability that every constraint holds.
    pub fn moment(&self, constraints: &[Constraint]) -> Result<Q> {
        let key = canonical_constraints(&self.model, constraints);
        if let Some(v) = self.map.read().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let v = latent_moment(&self.model, &key)?;
        self.map.write().expect("cache lock").insert(key, v.clone());
        Ok(v)
    }
}

/// Relabels items by first appearance (respecting datasets for the
/// multi-permutation prior), orients pairs, sorts and deduplicates.
fn canonical_constraints(model: &LatentModel, constraints: &[Constraint]) -> Vec<Constraint> {
    if constraints.iter().any(|c| matches!(c, Constraint::Fixed(..))) {
        let mut out = constraints.to_vec();
        out.sort();
        out.dedup();
        return out;
    }
    let mut item_map: HashMap<usize, usize> = HashMap::new();
    let mut dataset_map: HashMap<usize, usize> = HashMap::new();
    let mut points_in: Vec<usize> = Vec::new();
    let mut relabel = |item: usize| -> usize {
        if let Some(&v) = item_map.get(&item) {
            return v;
        }
        let v = match *model {
            LatentModel::MultiPermutation { k, .. } => {
                let next = dataset_map.len();
                let ds = *dataset_map.entry(item / k).or_insert(next);
                if ds == points_in.len() {
                    points_in.push(0);
                }
                points_in[ds] += 1;
                ds * k + points_in[ds] - 1
            }
            _ => item_map.len(),
        };
        item_map.insert(item, v);
        v
    };
    let mut out: Vec<Constraint> = constraints
        .iter()
        .map(|c| match *c {
            Constraint::Equal(a, b) => {
                let (a, b) = (relabel(a), relabel(b));
                Constraint::Equal(a.min(b), a.max(b))
            }
            Constraint::Band { a, b, rho } => {
                let (a, b) = (relabel(a), relabel(b));
                Constraint::Band { a: a.min(b), b: a.max(b), rho }
            }
            Constraint::Fixed(..) => unreachable!(),
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

fn check_grid(params: &ModelParams, alpha: &MultiIndex) -> Result<()> {
    if alpha.kind() != params.grid() {
        return Err(Error::Domain(format!(
            "multi-index lives on {:?} but the model grid is {:?}",
            alpha.kind(),
            params.grid()
        )));
    }
    Ok(())
}

/// Sufficient conditions for `κ_{x,α} = 0`.
///
/// Feature matching and clustering: `|α|` odd, or some column has total
/// multiplicity one (the Gaussian mean entry is then sign-symmetric given
/// everything else).  Feature matching additionally: some dataset among those
/// touched by `α` or by the two anchors is touched exactly once (counting the
/// anchor itself), which makes its permutation independent of everything else;
/// and `|α| < max(2|col(α)|, 2|sample(α) ∪ {0,1}| - 2)`.
/// Seriation: a diagonal cell (its band indicator is the constant `1`).
///
/// The zero multi-index is never null.
pub fn nullity_filter(params: &ModelParams, alpha: &MultiIndex) -> bool {
    if alpha.is_zero() {
        return false;
    }
    let d = alpha.degree();
    match params.grid() {
        GridKind::Square { .. } => alpha.entries().keys().any(|c| matches!(*c, Cell::Square { i, j } if i == j)),
        kind => {
            if d % 2 == 1 || alpha.column_multiplicities().values().any(|&m| m == 1) {
                return true;
            }
            if let GridKind::Tensor { .. } = kind {
                let mut touched: BTreeMap<usize, u32> = BTreeMap::from([(0, 1), (1, 1)]);
                for (cell, &mult) in alpha.entries() {
                    if let Cell::Tensor { m, .. } = *cell {
                        *touched.entry(m).or_insert(0) += mult;
                    }
                }
                if touched.values().any(|&c| c == 1) {
                    return true;
                }
                let samples = touched.len();
                if d < (2 * alpha.columns().len()).max(2 * samples - 2) {
                    return true;
                }
            }
            false
        }
    }
}

/// Exact `κ_{x,α}`; `α = 0` gives the first cumulant `E[x]`.
pub fn kappa_exact(params: &ModelParams, alpha: &MultiIndex) -> Result<Q> {
    kappa_exact_cached(params, alpha, &MomentCache::new(params.latent()))
}

/// [`kappa_exact`] with a shared moment cache (whose prior must match `params`).
pub fn kappa_exact_cached(params: &ModelParams, alpha: &MultiIndex, cache: &MomentCache) -> Result<Q> {
    params.validate()?;
    check_grid(params, alpha)?;
    if cache.model() != params.latent() {
        return Err(Error::Domain("moment cache belongs to a different prior".into()));
    }
    let target = params.target().constraint;
    if alpha.is_zero() {
        return cache.moment(&[target]);
    }
    let d = alpha.degree();
    if d > MAX_KAPPA_DEGREE {
        return Err(Error::size("|alpha| for exact cumulants", d as u128, MAX_KAPPA_DEGREE as u128));
    }
    let kind = params.grid();
    let positions = alpha.positions();
    let cumulant_of = |indicators: &[Constraint]| -> Result<Q> {
        let l = indicators.len() + 1;
        let table = MomentTable::try_from_fn(l, |mask| {
            let mut selected = Vec::with_capacity(l);
            if mask & 1 == 1 {
                selected.push(target);
            }
            for (i, c) in indicators.iter().enumerate() {
                if mask >> (i + 1) & 1 == 1 {
                    selected.push(*c);
                }
            }
            cache.moment(&selected)
        })?;
        joint_cumulant(&table)
    };
    match params {
        ModelParams::Seriation { rho, .. } => {
            let mut indicators = Vec::with_capacity(d);
            for cell in &positions {
                let (i, j) = kind.cell_items(cell);
                let j = j.expect("square cells touch two items");
                if i == j {
                    return Ok(Q::zero());
                }
                indicators.push(Constraint::Band { a: i, b: j, rho: *rho });
            }
            let lambda_d = params.lambda_pow(d).expect("seriation has an exact λ");
            Ok(lambda_d * cumulant_of(&indicators)?)
        }
        _ => {
            if d % 2 == 1 {
                return Ok(Q::zero());
            }
            let items: Vec<usize> = positions.iter().map(|c| kind.cell_items(c).0).collect();
            let mut total = Q::zero();
            for pairing in alpha.pairings(true)? {
                if pairing.pairs().iter().any(|&(a, b)| items[a] == items[b]) {
                    // A constant indicator kills every cumulant of order >= 2.
                    continue;
                }
                let indicators: Vec<Constraint> =
                    pairing.pairs().iter().map(|&(a, b)| Constraint::Equal(items[a], items[b])).collect();
                total += cumulant_of(&indicators)?;
            }
            Ok(params.lambda_pow(d).expect("even degree") * total)
        }
    }
}

/// Closed-form upper bound on `|κ_{x,α}|` for a nonzero `α`.
///
/// With `m = |supp(α) ∪ anchors|` and `cc = cc(α)`:
/// - clustering (needs `n >= 2(|α|+2)² K` and `K >= m`):
///   `4 λ^{|α|} |α|^{5|α|+9} K^{-(m-1)} (K m² / n)^{cc-1}`;
/// - feature matching (needs `|α| >= 2` and `K >= 2 m²`):
///   `λ^{|α|} (8 |α|^{18})^{|α|/2+1} K^{-(m-1)}`;
/// - seriation (needs `n >= 2 m²`):
///   `λ^{|α|} 2^{5|α|+7} (|α|+1)^{20|α|+21} (2ρ/n)^{m-1} (2ρ)^{-(cc-1)}`.
pub fn kappa_bound(params: &ModelParams, alpha: &MultiIndex) -> Result<f64> {
    params.validate()?;
    check_grid(params, alpha)?;
    let s = alpha_summary(alpha)?;
    let d = s.degree as f64;
    let m = s.support_with_anchors as f64;
    let cc = s.cc as f64;
    let ln_lambda = 0.5 * crate::rational::ln(&params.lambda_sq());
    if params.is_null_signal() {
        return Ok(0.0);
    }
    let ln_bound = match *params {
        ModelParams::Clustering { n, k, .. } => {
            let need = 2 * (s.degree + 2) * (s.degree + 2) * k;
            if n < need {
                return Err(Error::Precondition(format!("n >= 2(|alpha|+2)^2 K fails ({n} < {need})")));
            }
            if k < s.support_with_anchors {
                return Err(Error::Precondition(format!("K >= |supp(alpha) + anchors| fails ({k} < {m})")));
            }
            let (n, k) = (n as f64, k as f64);
            4f64.ln() + d * ln_lambda + (5.0 * d + 9.0) * d.ln() - (m - 1.0) * k.ln() + (cc - 1.0) * (k * m * m / n).ln()
        }
        ModelParams::Mfm { k, .. } => {
            if s.degree < 2 {
                return Err(Error::Precondition("|alpha| >= 2 fails".into()));
            }
            let need = 2 * s.support_with_anchors * s.support_with_anchors;
            if k < need {
                return Err(Error::Precondition(format!("K >= 2|supp(alpha) + anchors|^2 fails ({k} < {need})")));
            }
            d * ln_lambda + (d / 2.0 + 1.0) * (8f64.ln() + 18.0 * d.ln()) - (m - 1.0) * (k as f64).ln()
        }
        ModelParams::Seriation { n, rho, .. } => {
            let need = 2 * s.support_with_anchors * s.support_with_anchors;
            if n < need {
                return Err(Error::Precondition(format!("n >= 2|supp(alpha) + anchors|^2 fails ({n} < {need})")));
            }
            let (n, rho) = (n as f64, rho as f64);
            d * ln_lambda + (5.0 * d + 7.0) * 2f64.ln() + (20.0 * d + 21.0) * (d + 1.0).ln() + (m - 1.0) * (2.0 * rho / n).ln()
                - (cc - 1.0) * (2.0 * rho).ln()
        }
    };
    Ok(ln_bound.exp())
}

/// Exact value, bound and flags for one multi-index.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaReport {
    pub alpha: MultiIndex,
    /// Exact `κ_{x,α}`.
    pub exact: Q,
    /// Closed-form bound, when its hypotheses hold.
    pub bound: Option<f64>,
    /// Whether a nullity rule applies (then `exact` is `0`).
    pub null: bool,
    /// Whether the bound's hypotheses hold.
    pub preconditions_met: bool,
}

/// Computes a [`KappaReport`]; a nonzero `α` is required.
pub fn kappa_report(params: &ModelParams, alpha: &MultiIndex, cache: &MomentCache) -> Result<KappaReport> {
    if alpha.is_zero() {
        return Err(Error::Domain("kappa reports need a nonzero multi-index".into()));
    }
    let null = nullity_filter(params, alpha);
    let exact = if null { Q::zero() } else { kappa_exact_cached(params, alpha, cache)? };
    let bound = match kappa_bound(params, alpha) {
        Ok(b) => Some(b),
        Err(Error::Precondition(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(KappaReport { alpha: alpha.clone(), exact, preconditions_met: bound.is_some(), bound, null })
}

//! Random instance generators for the randomized verification suites.
//!
//! Each generator is a deterministic function of the supplied generator, so
//! a suite driven by a seeded [`crate::models::ModelRng`] is reproducible.

use rand::Rng;

use crate::combinatorics::{Cell, GridKind, MultiIndex};
use crate::cumulant::MomentSpec;
use crate::error::Result;
use crate::models::{Constraint, LatentModel};
use crate::rational::{q, qfrac, Q};
use crate::series::{EdgeSymbol, PolyGraph, Series};

/// Which hypothesis branch of the general cumulant bound a random spec targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecBranch {
    /// No `B` sets; `2 L² x0 <= 1`.
    WithoutB,
    /// At least one nonempty `B` set; `2 L² y0 <= 1` and `2 x0 <= y0`.
    WithB,
}

/// Splits `items` into `parts` disjoint groups by independent uniform labels
/// (label `parts` means "unassigned"); empty groups are dropped.
fn random_groups(items: usize, parts: usize, rng: &mut impl Rng) -> Vec<Vec<usize>> {
    let mut groups = vec![Vec::new(); parts];
    for v in 0..items {
        let g = rng.random_range(0..=parts);
        if g < parts {
            groups[g].push(v);
        }
    }
    groups.retain(|g| !g.is_empty());
    groups
}

/// Random spec with `l <= max_ell` sets and `L <= max_items` items that
/// satisfies the hypotheses of the requested branch.
pub fn random_spec(rng: &mut impl Rng, max_ell: usize, max_items: usize, branch: SpecBranch) -> Result<MomentSpec> {
    let ell = rng.random_range(1..=max_ell.max(1));
    let big_l = rng.random_range(ell..=max_items.max(ell));
    // Consecutive blocks with random cut points.
    let mut cuts: Vec<usize> = rand::seq::index::sample(rng, big_l - 1, ell - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(big_l);
    let i_sets: Vec<Vec<usize>> = cuts.windows(2).map(|w| (w[0]..w[1]).collect()).collect();

    let a_sets = random_groups(big_l, rng.random_range(0..=2), rng);
    let mut b_sets = Vec::new();
    if branch == SpecBranch::WithB {
        while b_sets.is_empty() {
            b_sets = random_groups(big_l, rng.random_range(1..=2), rng);
        }
    }
    let eta = random_eta(rng);
    let two_l2 = 2 * (big_l * big_l) as i64;
    let (x0, y0) = match branch {
        SpecBranch::WithoutB => {
            let x0 = qfrac(rng.random_range(0..=4), two_l2 * 4);
            (x0, qfrac(rng.random_range(0..=4), two_l2 * 4))
        }
        SpecBranch::WithB => {
            let y0 = qfrac(rng.random_range(1..=4), two_l2 * 4);
            let x0 = &y0 * qfrac(rng.random_range(0..=4), 8);
            (x0, y0)
        }
    };
    MomentSpec::new(eta, x0, y0, i_sets, a_sets, b_sets)
}

/// Random series truncated at `cap` whose support has total degree at most
/// `max_degree`; coefficients are small nonzero integers.  The constant term
/// is zero unless `with_constant`.
pub fn random_series(rng: &mut impl Rng, cap: usize, max_degree: usize, with_constant: bool) -> Series {
    let mut f = Series::zero(cap);
    let terms = rng.random_range(0..=4);
    for _ in 0..terms {
        let d = rng.random_range(0..=max_degree.min(cap));
        let s = rng.random_range(0..=d);
        if d == 0 && !with_constant {
            continue;
        }
        let mut c = rng.random_range(1..=3i64);
        if rng.random_bool(0.5) {
            c = -c;
        }
        f.set_coeff(s, d - s, f.coeff(s, d - s) + q(c));
    }
    f
}

/// Random multigraph on `n` vertices with `x`, `y` and weight-one edges.
pub fn random_poly_graph(rng: &mut impl Rng, n: usize, edge_prob: f64) -> PolyGraph {
    let mut g = PolyGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(edge_prob) {
                let w = match rng.random_range(0..3) {
                    0 => EdgeSymbol::One,
                    1 => EdgeSymbol::X,
                    _ => EdgeSymbol::Y,
                };
                g.add_edge(u, v, w);
            }
        }
    }
    g
}

/// Random list of `1..=max_constraints` events valid for `model`.
pub fn random_constraints(rng: &mut impl Rng, model: &LatentModel, max_constraints: usize) -> Vec<Constraint> {
    let n = model.item_count();
    let labels = model.label_count();
    let count = rng.random_range(1..=max_constraints.max(1));
    (0..count)
        .map(|_| {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            let kinds = if matches!(model, LatentModel::Permutation { .. }) { 3 } else { 2 };
            match rng.random_range(0..kinds) {
                0 => Constraint::Equal(a, b),
                1 => Constraint::Fixed(a, rng.random_range(0..labels)),
                _ => Constraint::Band { a, b, rho: rng.random_range(0..labels) },
            }
        })
        .collect()
}

/// Random nonzero multi-index of degree `1..=max_degree`; cells are drawn
/// among the first `window` items (and all features) so that supports overlap.
pub fn random_multi_index(rng: &mut impl Rng, kind: GridKind, max_degree: usize, window: usize) -> Result<MultiIndex> {
    let degree = rng.random_range(1..=max_degree.max(1));
    let cells: Vec<Cell> = (0..degree)
        .map(|_| match kind {
            GridKind::Matrix { n, p } => Cell::Matrix { row: rng.random_range(0..window.min(n)), col: rng.random_range(0..p) },
            GridKind::Tensor { k, m, p } => Cell::Tensor {
                k: rng.random_range(0..window.min(k)),
                m: rng.random_range(0..m),
                col: rng.random_range(0..p),
            },
            GridKind::Square { n } => Cell::Square { i: rng.random_range(0..window.min(n)), j: rng.random_range(0..window.min(n)) },
        })
        .collect();
    MultiIndex::from_cells(kind, cells)
}

/// `η = a/b` with `1 <= a <= b <= 6`.
fn random_eta(rng: &mut impl Rng) -> Q {
    let den = rng.random_range(1..=6i64);
    qfrac(rng.random_range(1..=den), den)
}

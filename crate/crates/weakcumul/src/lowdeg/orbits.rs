//! Enumeration of multi-indices up to the exchangeability of each model.
//!
//! Symmetry groups (anchors always fixed):
//! - matrix grid: permutations of rows other than `0, 1` and of all columns;
//! - tensor grid: permutations of datasets other than `0, 1`, of points within
//!   each dataset (point `0` fixed in datasets `0` and `1`), and of columns;
//! - square grid: permutations of items other than `0, 1`.
//!
//! A multi-index is represented by its *pattern*: the sequence of its cells
//! with labels renamed in order of first appearance.  The canonical pattern is
//! the smallest one over all orderings of the `|α|` positions.  The orbit size is
//! `(number of injective relabellings) / |Aut(α)|`, where the automorphism count
//! is `#(orderings reaching the canonical pattern) / α!`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;

use crate::combinatorics::{Cell, GridKind, MultiIndex};
use crate::error::{Error, Result};

/// Largest degree handled by orbit enumeration.
pub const MAX_ORBIT_DEGREE: usize = 6;

/// One symmetry class of multi-indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    /// Canonical representative (labels as small as possible).
    pub alpha: MultiIndex,
    /// Number of multi-indices in the class.
    pub size: u128,
}

type Abstract = (usize, usize, usize);

/// Renames labels of a cell sequence in order of first appearance.
fn normalize(cells: &[Cell]) -> Vec<Abstract> {
    let mut rows: HashMap<usize, usize> = HashMap::new();
    let mut cols: HashMap<usize, usize> = HashMap::new();
    let mut datasets: HashMap<usize, usize> = HashMap::new();
    let mut points: HashMap<(usize, usize), usize> = HashMap::new();
    let mut points_per_dataset: HashMap<usize, usize> = HashMap::new();
    let fresh = |map: &mut HashMap<usize, usize>, key: usize, base: usize, fixed: &[usize]| -> usize {
        if fixed.contains(&key) {
            return key;
        }
        let next = base + map.len();
        *map.entry(key).or_insert(next)
    };
    cells
        .iter()
        .map(|c| match *c {
            Cell::Matrix { row, col } => (fresh(&mut rows, row, 2, &[0, 1]), fresh(&mut cols, col, 0, &[]), 0),
            Cell::Square { i, j } => {
                let a = fresh(&mut rows, i, 2, &[0, 1]);
                (a, fresh(&mut rows, j, 2, &[0, 1]), 0)
            }
            Cell::Tensor { k, m, col } => {
                let ds = fresh(&mut datasets, m, 2, &[0, 1]);
                let anchored = ds < 2;
                let pt = if anchored && k == 0 {
                    0
                } else {
                    let base = usize::from(anchored);
                    let count = points_per_dataset.entry(ds).or_insert(0);
                    *points.entry((ds, k)).or_insert_with(|| {
                        *count += 1;
                        base + *count - 1
                    })
                };
                (ds, pt, fresh(&mut cols, col, 0, &[]))
            }
        })
        .collect()
}

fn to_cell(kind: GridKind, a: Abstract) -> Cell {
    match kind {
        GridKind::Matrix { .. } => Cell::Matrix { row: a.0, col: a.1 },
        GridKind::Square { .. } => Cell::Square { i: a.0, j: a.1 },
        GridKind::Tensor { .. } => Cell::Tensor { k: a.1, m: a.0, col: a.2 },
    }
}

/// Canonical pattern and the number of position orderings reaching it.
fn canonical(cells: &[Cell]) -> (Vec<Abstract>, u128) {
    let mut best: Option<Vec<Abstract>> = None;
    let mut hits = 0u128;
    for order in (0..cells.len()).permutations(cells.len()) {
        let seq: Vec<Cell> = order.iter().map(|&i| cells[i]).collect();
        let pattern = normalize(&seq);
        match &best {
            Some(b) if pattern > *b => {}
            Some(b) if pattern == *b => hits += 1,
            _ => {
                best = Some(pattern);
                hits = 1;
            }
        }
    }
    (best.unwrap_or_default(), hits)
}

fn falling(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).map(|i| (n - i) as u128).product()
}

/// Number of injective, symmetry-respecting relabellings of a canonical pattern.
fn labelling_count(kind: GridKind, pattern: &[Abstract]) -> u128 {
    match kind {
        GridKind::Matrix { n, p } => {
            let rows: BTreeSet<usize> = pattern.iter().map(|a| a.0).filter(|&r| r >= 2).collect();
            let cols: BTreeSet<usize> = pattern.iter().map(|a| a.1).collect();
            falling(n.saturating_sub(2), rows.len()) * falling(p, cols.len())
        }
        GridKind::Square { n } => {
            let items: BTreeSet<usize> = pattern.iter().flat_map(|a| [a.0, a.1]).filter(|&r| r >= 2).collect();
            falling(n.saturating_sub(2), items.len())
        }
        GridKind::Tensor { k, m, p } => {
            let mut per_dataset: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
            for a in pattern {
                per_dataset.entry(a.0).or_default().insert(a.1);
            }
            let cols: BTreeSet<usize> = pattern.iter().map(|a| a.2).collect();
            let new_datasets = per_dataset.keys().filter(|&&d| d >= 2).count();
            let mut total = falling(m.saturating_sub(2), new_datasets) * falling(p, cols.len());
            for (&ds, pts) in &per_dataset {
                total *= if ds < 2 {
                    falling(k - 1, pts.iter().filter(|&&pt| pt > 0).count())
                } else {
                    falling(k, pts.len())
                };
            }
            total
        }
    }
}

/// Generates every pattern of length `d` whose new labels appear in order
/// (bounded by the grid), calling `f` on the realized cells.
fn for_each_pattern(kind: GridKind, d: usize, f: &mut dyn FnMut(&[Cell])) {
    #[derive(Clone)]
    struct State {
        rows: usize,
        cols: usize,
        datasets: usize,
        points: Vec<usize>,
    }
    fn rec(kind: GridKind, d: usize, state: State, cells: &mut Vec<Cell>, f: &mut dyn FnMut(&[Cell])) {
        if cells.len() == d {
            f(cells);
            return;
        }
        match kind {
            GridKind::Matrix { n, p } => {
                for row in 0..=state.rows.min(n - 1) {
                    for col in 0..=state.cols.min(p - 1) {
                        let mut s = state.clone();
                        s.rows = s.rows.max(row + 1);
                        s.cols = s.cols.max(col + 1);
                        cells.push(Cell::Matrix { row, col });
                        rec(kind, d, s, cells, f);
                        cells.pop();
                    }
                }
            }
            GridKind::Square { n } => {
                for i in 0..=state.rows.min(n - 1) {
                    let after_i = state.rows.max(i + 1);
                    for j in 0..=after_i.min(n - 1) {
                        let mut s = state.clone();
                        s.rows = after_i.max(j + 1);
                        cells.push(Cell::Square { i, j });
                        rec(kind, d, s, cells, f);
                        cells.pop();
                    }
                }
            }
            GridKind::Tensor { k, m, p } => {
                for ds in 0..=state.datasets.min(m - 1) {
                    let used = state.points.get(ds).copied().unwrap_or(0);
                    for pt in 0..=used.min(k - 1) {
                        for col in 0..=state.cols.min(p - 1) {
                            let mut s = state.clone();
                            s.datasets = s.datasets.max(ds + 1);
                            if s.points.len() <= ds {
                                s.points.resize(ds + 1, 0);
                            }
                            s.points[ds] = s.points[ds].max(pt + 1);
                            s.cols = s.cols.max(col + 1);
                            cells.push(Cell::Tensor { k: pt, m: ds, col });
                            rec(kind, d, s, cells, f);
                            cells.pop();
                        }
                    }
                }
            }
        }
    }
    // Anchors count as already used labels: rows/items 0 and 1, datasets 0 and 1
    // with their point 0.
    let state = match kind {
        GridKind::Matrix { n, .. } | GridKind::Square { n } => State { rows: 2.min(n), cols: 0, datasets: 0, points: vec![] },
        GridKind::Tensor { m, .. } => State { rows: 0, cols: 0, datasets: 2.min(m), points: vec![1; 2.min(m)] },
    };
    rec(kind, d, state, &mut Vec::with_capacity(d), f);
}

/// All symmetry classes of multi-indices of degree `d >= 1`, in canonical order.
pub fn enumerate_orbits(kind: GridKind, d: usize) -> Result<Vec<Orbit>> {
    if d == 0 || d > MAX_ORBIT_DEGREE {
        return Err(Error::size("orbit enumeration degree", d as u128, MAX_ORBIT_DEGREE as u128));
    }
    let mut seen: BTreeMap<Vec<Abstract>, u128> = BTreeMap::new();
    let mut err = None;
    for_each_pattern(kind, d, &mut |cells| {
        // Only canonical patterns are kept; a sequence is canonical iff it is
        // its own normal form and no ordering gives a smaller one.
        let pattern = normalize(cells);
        if pattern.as_slice() != cells.iter().map(|&c| cell_abstract(c)).collect::<Vec<_>>().as_slice() {
            return;
        }
        if seen.contains_key(&pattern) {
            return;
        }
        let (best, hits) = canonical(cells);
        if best != pattern {
            return;
        }
        seen.insert(pattern, hits);
    });
    let mut out = Vec::with_capacity(seen.len());
    for (pattern, hits) in seen {
        let alpha = match MultiIndex::from_cells(kind, pattern.iter().map(|&a| to_cell(kind, a))) {
            Ok(a) => a,
            Err(e) => {
                err = Some(e);
                break;
            }
        };
        let automorphisms = hits / alpha.factorial();
        let labellings = labelling_count(kind, &pattern);
        if labellings == 0 {
            continue;
        }
        debug_assert_eq!(labellings % automorphisms, 0);
        out.push(Orbit { alpha, size: labellings / automorphisms });
    }
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn cell_abstract(c: Cell) -> Abstract {
    match c {
        Cell::Matrix { row, col } => (row, col, 0),
        Cell::Square { i, j } => (i, j, 0),
        Cell::Tensor { k, m, col } => (m, k, col),
    }
}

/// Every multi-index of degree `d` on the grid, without symmetry reduction.
pub fn enumerate_naive(kind: GridKind, d: usize, cap: u128) -> Result<Vec<MultiIndex>> {
    let cells = kind.cell_count();
    let count = crate::rational::binomial((cells + d).saturating_sub(1) as u64, d as u64);
    let count = u128::try_from(count).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::size("naive multi-index enumeration", count, cap));
    }
    (0..cells)
        .combinations_with_replacement(d)
        .map(|idx| MultiIndex::from_cells(kind, idx.into_iter().map(|i| kind.cell_at(i))))
        .collect()
}

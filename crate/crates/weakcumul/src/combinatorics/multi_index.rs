//! Multi-indices (multisets of observation cells) and their incidence summaries.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use super::pairing::{enumerate_pairings, Pairing};
use crate::error::{Error, Result};

/// Shape of the observation grid a multi-index lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GridKind {
    /// `n x p` matrix: rows are items, columns are features (clustering).
    Matrix { n: usize, p: usize },
    /// `K x M x p` tensor: item `(k, m)` is point `k` of dataset `m` (feature matching).
    Tensor { k: usize, m: usize, p: usize },
    /// `n x n` matrix indexed by pairs of items (seriation).
    Square { n: usize },
}

/// One cell of an observation grid (all indices 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Cell {
    Matrix { row: usize, col: usize },
    Tensor { k: usize, m: usize, col: usize },
    Square { i: usize, j: usize },
}

impl Cell {
    /// Feature coordinate of the cell (`None` for the square grid).
    pub fn column(&self) -> Option<usize> {
        match *self {
            Cell::Matrix { col, .. } | Cell::Tensor { col, .. } => Some(col),
            Cell::Square { .. } => None,
        }
    }
}

impl GridKind {
    /// Number of items (latent-labelled units) of the grid.
    ///
    /// For the tensor kind, item `(k, m)` is encoded as `m * K + k`.
    pub fn item_count(&self) -> usize {
        match *self {
            GridKind::Matrix { n, .. } => n,
            GridKind::Tensor { k, m, .. } => k * m,
            GridKind::Square { n } => n,
        }
    }

    /// Number of cells of the grid.
    pub fn cell_count(&self) -> usize {
        match *self {
            GridKind::Matrix { n, p } => n * p,
            GridKind::Tensor { k, m, p } => k * m * p,
            GridKind::Square { n } => n * n,
        }
    }

    /// The two anchor items carrying the target indicator.
    ///
    /// Rows/items 0 and 1 for matrix and square grids; items `(0,0)` and `(0,1)`
    /// (point 0 of datasets 0 and 1) for the tensor grid.
    pub fn anchors(&self) -> [usize; 2] {
        match *self {
            GridKind::Tensor { k, .. } => [0, k],
            _ => [0, 1],
        }
    }

    /// Whether `cell` belongs to this grid.
    pub fn contains(&self, cell: &Cell) -> bool {
        match (*self, *cell) {
            (GridKind::Matrix { n, p }, Cell::Matrix { row, col }) => row < n && col < p,
            (GridKind::Tensor { k, m, p }, Cell::Tensor { k: a, m: b, col }) => a < k && b < m && col < p,
            (GridKind::Square { n }, Cell::Square { i, j }) => i < n && j < n,
            _ => false,
        }
    }

    /// Items touched by a cell (one for matrix/tensor, two for square).
    pub fn cell_items(&self, cell: &Cell) -> (usize, Option<usize>) {
        match (*self, *cell) {
            (_, Cell::Matrix { row, .. }) => (row, None),
            (GridKind::Tensor { k, .. }, Cell::Tensor { k: a, m: b, .. }) => (b * k + a, None),
            (_, Cell::Square { i, j }) => (i, Some(j)),
            (_, Cell::Tensor { .. }) => unreachable!("tensor cell on non-tensor grid"),
        }
    }

    /// Cell at a dense index in `0..cell_count()` (row-major).
    pub fn cell_at(&self, idx: usize) -> Cell {
        match *self {
            GridKind::Matrix { p, .. } => Cell::Matrix { row: idx / p, col: idx % p },
            GridKind::Tensor { k, p, .. } => {
                let col = idx % p;
                let item = idx / p;
                Cell::Tensor { k: item % k, m: item / k, col }
            }
            GridKind::Square { n } => Cell::Square { i: idx / n, j: idx % n },
        }
    }
}

/// A multiset of grid cells with positive multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    kind: GridKind,
    entries: BTreeMap<Cell, u32>,
}

impl MultiIndex {
    /// The zero multi-index on a grid.
    pub fn zero(kind: GridKind) -> Self {
        Self { kind, entries: BTreeMap::new() }
    }

    /// Builds a multi-index from a list of cells (repetitions add multiplicity).
    pub fn from_cells(kind: GridKind, cells: impl IntoIterator<Item = Cell>) -> Result<Self> {
        let mut alpha = Self::zero(kind);
        for c in cells {
            alpha.add(c, 1)?;
        }
        Ok(alpha)
    }

    /// Adds `mult` copies of `cell`.
    pub fn add(&mut self, cell: Cell, mult: u32) -> Result<()> {
        if !self.kind.contains(&cell) {
            return Err(Error::Domain(format!("cell {cell:?} outside grid {:?}", self.kind)));
        }
        if mult > 0 {
            *self.entries.entry(cell).or_insert(0) += mult;
        }
        Ok(())
    }

    /// Grid kind.
    pub fn kind(&self) -> GridKind {
        self.kind
    }

    /// Cells with their multiplicities, in cell order.
    pub fn entries(&self) -> &BTreeMap<Cell, u32> {
        &self.entries
    }

    /// `|alpha|`, the total multiplicity.
    pub fn degree(&self) -> usize {
        self.entries.values().map(|&m| m as usize).sum()
    }

    /// True for the zero multi-index.
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `alpha! = prod of factorials of multiplicities`.
    pub fn factorial(&self) -> u128 {
        self.entries
            .values()
            .map(|&m| (1..=m as u128).product::<u128>())
            .product()
    }

    /// Cells listed with repetition (each copy is a separate position).
    pub fn positions(&self) -> Vec<Cell> {
        self.entries
            .iter()
            .flat_map(|(&c, &m)| std::iter::repeat_n(c, m as usize))
            .collect()
    }

    /// Pairings of the positions; with `same_column_only`, every pair shares its feature coordinate.
    pub fn pairings(&self, same_column_only: bool) -> Result<Vec<Pairing>> {
        let pos = self.positions();
        enumerate_pairings(pos.len(), |a, b| !same_column_only || pos[a].column() == pos[b].column())
    }

    /// Items touched by the multi-index (`supp`).
    pub fn support(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        for c in self.entries.keys() {
            let (a, b) = self.kind.cell_items(c);
            s.insert(a);
            if let Some(b) = b {
                s.insert(b);
            }
        }
        s
    }

    /// Feature coordinates touched (`col`), empty for the square grid.
    pub fn columns(&self) -> BTreeSet<usize> {
        self.entries.keys().filter_map(|c| c.column()).collect()
    }

    /// Datasets touched (`sample`); only meaningful for the tensor grid.
    pub fn samples(&self) -> BTreeSet<usize> {
        self.entries
            .keys()
            .filter_map(|c| match *c {
                Cell::Tensor { m, .. } => Some(m),
                _ => None,
            })
            .collect()
    }

    /// Total multiplicity per feature column.
    pub fn column_multiplicities(&self) -> BTreeMap<usize, u32> {
        let mut out = BTreeMap::new();
        for (c, &m) in &self.entries {
            if let Some(j) = c.column() {
                *out.entry(j).or_insert(0) += m;
            }
        }
        out
    }
}

/// Incidence summary of a nonzero multi-index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphaSummary {
    /// `|alpha|`.
    pub degree: usize,
    /// `alpha!`.
    pub factorial: u128,
    /// Items touched (tensor items encoded as `m * K + k`).
    pub support: BTreeSet<usize>,
    /// `|supp(alpha) ∪ anchors|`.
    pub support_with_anchors: usize,
    /// Feature coordinates touched.
    pub columns: BTreeSet<usize>,
    /// Datasets touched (tensor grid only).
    pub samples: Option<BTreeSet<usize>>,
    /// Components of the incidence multigraph (non-isolated vertices plus the
    /// two anchors) after adding the edge between the anchors.
    pub cc: usize,
    /// Vertex count of that graph.
    pub vertices: usize,
}

/// Computes `|alpha|`, `alpha!`, supports and the component count `cc(alpha)`.
///
/// The multigraph is bipartite (item vertices and feature vertices, one edge
/// per copy of a cell) for the matrix and tensor grids, and lives on items
/// (one edge `i - j` per copy of `(i, j)`) for the square grid.  In every case
/// the two anchor items are kept even when isolated and joined by an extra edge.
pub fn alpha_summary(alpha: &MultiIndex) -> Result<AlphaSummary> {
    if alpha.is_zero() {
        return Err(Error::Domain("alpha_summary requires a nonzero multi-index".into()));
    }
    let kind = alpha.kind();
    let anchors = kind.anchors();
    let support = alpha.support();
    let columns = alpha.columns();
    let mut items: BTreeSet<usize> = support.clone();
    items.extend(anchors);
    // Vertex ids: items first, then feature columns.
    let item_id: BTreeMap<usize, usize> = items.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let col_id: BTreeMap<usize, usize> =
        columns.iter().enumerate().map(|(i, &c)| (c, items.len() + i)).collect();
    let vertices = items.len() + col_id.len();
    let mut uf = UnionFind::<usize>::new(vertices);
    uf.union(item_id[&anchors[0]], item_id[&anchors[1]]);
    for c in alpha.entries().keys() {
        let (a, b) = kind.cell_items(c);
        match (b, c.column()) {
            (Some(b), _) => {
                uf.union(item_id[&a], item_id[&b]);
            }
            (None, Some(j)) => {
                uf.union(item_id[&a], col_id[&j]);
            }
            (None, None) => unreachable!(),
        }
    }
    let labels = uf.into_labeling();
    let cc = labels.iter().collect::<BTreeSet<_>>().len();
    Ok(AlphaSummary {
        degree: alpha.degree(),
        factorial: alpha.factorial(),
        support_with_anchors: items.len(),
        support,
        columns,
        samples: matches!(kind, GridKind::Tensor { .. }).then(|| alpha.samples()),
        cc,
        vertices,
    })
}

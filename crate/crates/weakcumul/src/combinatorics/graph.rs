//! Weighted dependency graphs: thresholded components and maximal spanning-tree weight.

use petgraph::unionfind::UnionFind;

use super::partition::SetPartition;
use crate::error::{Error, Result};

/// Undirected graph on `{0, ..., n-1}` with edge weights in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    /// Builds a graph from an edge list, validating every edge.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut g = Self::new(n);
        for (u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    /// Adds the undirected edge `{u, v}` with weight `w`.
    pub fn add_edge(&mut self, u: usize, v: usize, w: f64) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::Domain(format!("edge ({u},{v}) outside vertex set of size {}", self.n)));
        }
        if u == v {
            return Err(Error::Domain(format!("self-loop at vertex {u}")));
        }
        if !(w > 0.0 && w <= 1.0) {
            return Err(Error::Domain(format!("edge weight {w} outside (0, 1]")));
        }
        self.edges.push((u, v, w));
        Ok(())
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// The edge list.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }
}

/// Components of the subgraph keeping only edges with weight `>= min_weight`.
///
/// With `min_weight = 1` this is the partition induced by the weight-one subgraph.
pub fn connected_components(g: &WeightedGraph, min_weight: f64) -> SetPartition {
    let mut uf = UnionFind::<usize>::new(g.n);
    for &(u, v, w) in &g.edges {
        if w >= min_weight {
            uf.union(u, v);
        }
    }
    SetPartition::from_labels(&dense_labels(&uf.into_labeling()))
}

/// Maximum over spanning trees of the product of edge weights; `0` when disconnected.
///
/// Kruskal's algorithm on weights in decreasing order maximizes the sum of
/// log-weights, hence the product.  A single vertex (or none) yields the empty
/// product `1`.
pub fn max_weight_spanning_tree_weight(g: &WeightedGraph) -> f64 {
    if g.n <= 1 {
        return 1.0;
    }
    let mut order: Vec<usize> = (0..g.edges.len()).collect();
    order.sort_by(|&a, &b| g.edges[b].2.total_cmp(&g.edges[a].2).then(a.cmp(&b)));
    let mut uf = UnionFind::<usize>::new(g.n);
    let mut log_weight = 0.0;
    let mut used = 0;
    for i in order {
        let (u, v, w) = g.edges[i];
        if uf.union(u, v) {
            log_weight += w.ln();
            used += 1;
            if used == g.n - 1 {
                break;
            }
        }
    }
    if used + 1 < g.n {
        0.0
    } else {
        log_weight.exp()
    }
}

/// Relabels representative labels to `0, 1, ...` in order of first appearance.
pub(crate) fn dense_labels(raw: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    raw.iter()
        .map(|r| {
            let next = map.len();
            *map.entry(*r).or_insert(next)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn component_examples() {
        let g = WeightedGraph::new(3);
        assert_eq!(connected_components(&g, 1.0).blocks(), &[vec![0], vec![1], vec![2]]);
        let path = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(connected_components(&path, 1.0).blocks(), &[vec![0, 1, 2]]);
        let mixed = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 0.5)]).unwrap();
        assert_eq!(connected_components(&mixed, 1.0).blocks(), &[vec![0, 1], vec![2]]);
    }

    #[test]
    fn spanning_tree_examples() {
        assert_eq!(max_weight_spanning_tree_weight(&WeightedGraph::new(1)), 1.0);
        let two = WeightedGraph::from_edges(4, [(0, 1, 1.0), (2, 3, 0.5)]).unwrap();
        assert_eq!(max_weight_spanning_tree_weight(&two), 0.0);
        let tri = WeightedGraph::from_edges(3, [(0, 1, 0.5), (1, 2, 0.25), (0, 2, 0.4)]).unwrap();
        assert!((max_weight_spanning_tree_weight(&tri) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn invalid_edges() {
        let mut g = WeightedGraph::new(2);
        assert!(g.add_edge(0, 0, 1.0).is_err());
        assert!(g.add_edge(0, 1, 0.0).is_err());
        assert!(g.add_edge(0, 1, 1.5).is_err());
        assert!(g.add_edge(0, 2, 1.0).is_err());
    }

    fn two_level_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize, bool)>, f64)> {
        (2usize..9).prop_flat_map(|n| {
            let edge = (0..n, 0..n, any::<bool>());
            (Just(n), prop::collection::vec(edge, 0..20), 0.01f64..0.99)
        })
    }

    proptest! {
        // On a connected graph with weights in {1, w}, the best tree uses as many
        // weight-one edges as possible, leaving cc - 1 edges of weight w.
        #[test]
        fn two_level_weight((n, raw, w) in two_level_graph()) {
            let mut g = WeightedGraph::new(n);
            for (u, v, one) in raw {
                if u != v {
                    g.add_edge(u, v, if one { 1.0 } else { w }).unwrap();
                }
            }
            let full = connected_components(&g, 0.0);
            let value = max_weight_spanning_tree_weight(&g);
            if full.len() == 1 {
                let cc = connected_components(&g, 1.0).len();
                let expected = w.powi(cc as i32 - 1);
                prop_assert!((value - expected).abs() <= 1e-12 * expected.max(1e-300));
            } else {
                prop_assert_eq!(value, 0.0);
            }
        }
    }
}

//! Polynomial graphs (edges labelled `x`, `y` or `1`) and their order.

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::order::Order;
use crate::cumulant::MomentSpec;

/// Symbolic edge weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EdgeSymbol {
    /// Weight `x`.
    X,
    /// Weight `y`.
    Y,
    /// Weight `1`.
    One,
}

/// Undirected multigraph on `{0, ..., n-1}` with symbolic edge weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PolyGraph {
    n: usize,
    edges: Vec<(usize, usize, EdgeSymbol)>,
}

/// Vertex count above which [`poly_graph_order`] switches from exhaustive
/// spanning-tree enumeration to the two greedy tree optimizations.
pub const EXHAUSTIVE_TREE_LIMIT: usize = 8;

impl PolyGraph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    /// Adds an edge; self-loops are ignored (they never belong to a tree).
    pub fn add_edge(&mut self, u: usize, v: usize, w: EdgeSymbol) {
        assert!(u < self.n && v < self.n, "edge endpoint out of range");
        if u != v {
            self.edges.push((u.min(v), u.max(v), w));
        }
    }

    /// Vertex count.
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Edge list.
    pub fn edges(&self) -> &[(usize, usize, EdgeSymbol)] {
        &self.edges
    }

    /// Subgraph induced by the vertices in `mask`, relabelled `0..|mask|` in increasing order.
    pub fn induced(&self, mask: u32) -> PolyGraph {
        let keep: Vec<usize> = (0..self.n).filter(|v| mask & (1 << v) != 0).collect();
        let pos = |v: usize| keep.iter().position(|&k| k == v);
        let mut g = PolyGraph::new(keep.len());
        for &(u, v, w) in &self.edges {
            if let (Some(a), Some(b)) = (pos(u), pos(v)) {
                g.add_edge(a, b, w);
            }
        }
        g
    }

    /// Components of the subgraph made of weight-one edges, as vertex labels.
    pub fn one_components(&self) -> Vec<usize> {
        let mut uf = UnionFind::<usize>::new(self.n);
        for &(u, v, w) in &self.edges {
            if w == EdgeSymbol::One {
                uf.union(u, v);
            }
        }
        uf.into_labeling()
    }
}

/// The dependency graph of a spec: a `y` edge between `t` and `t'` if some `B_i`
/// meets both `I_t` and `I_t'`; otherwise an `x` edge if some `A_j` does.
pub fn build_lstar(spec: &MomentSpec) -> PolyGraph {
    let l = spec.ell();
    let meets = |set: &Vec<usize>, t: usize| spec.i_sets()[t].iter().any(|v| set.binary_search(v).is_ok());
    let mut g = PolyGraph::new(l);
    for t in 0..l {
        for u in t + 1..l {
            if spec.b_sets().iter().any(|b| meets(b, t) && meets(b, u)) {
                g.add_edge(t, u, EdgeSymbol::Y);
            } else if spec.a_sets().iter().any(|a| meets(a, t) && meets(a, u)) {
                g.add_edge(t, u, EdgeSymbol::X);
            }
        }
    }
    g
}

/// Kruskal with 0/1 edge costs: minimal number of cost-one edges in a
/// spanning tree, or `None` when the graph is disconnected.
fn min_tree_cost(g: &PolyGraph, cost: impl Fn(EdgeSymbol) -> u32) -> Option<u32> {
    let mut order: Vec<usize> = (0..g.edges.len()).collect();
    order.sort_by_key(|&i| (cost(g.edges[i].2), i));
    let mut uf = UnionFind::<usize>::new(g.n);
    let (mut used, mut total) = (0usize, 0u32);
    for i in order {
        let (u, v, w) = g.edges[i];
        if uf.union(u, v) {
            used += 1;
            total += cost(w);
        }
    }
    (used + 1 >= g.n).then_some(total)
}

/// Order via two spanning-tree optimizations: minimal `#x`, then minimal `#x + #y`.
pub fn poly_graph_order_greedy(g: &PolyGraph) -> Order {
    let min_x = min_tree_cost(g, |w| u32::from(w == EdgeSymbol::X));
    let min_xy = min_tree_cost(g, |w| u32::from(w != EdgeSymbol::One));
    match (min_x, min_xy) {
        (Some(a), Some(b)) => Order::Finite(a, b - a),
        _ => Order::Infinite,
    }
}

/// Order as the `⪰`-infimum of `(#x, #y)` over all spanning trees, by enumeration.
pub fn poly_graph_order_exhaustive(g: &PolyGraph) -> Order {
    if g.n <= 1 {
        return Order::Finite(0, 0);
    }
    let mut degrees = Vec::new();
    fn rec(
        g: &PolyGraph,
        i: usize,
        chosen: &mut Vec<usize>,
        degrees: &mut Vec<(u32, u32)>,
    ) {
        if chosen.len() + 1 == g.n {
            let mut uf = UnionFind::<usize>::new(g.n);
            if chosen.iter().all(|&e| uf.union(g.edges[e].0, g.edges[e].1)) {
                let x = chosen.iter().filter(|&&e| g.edges[e].2 == EdgeSymbol::X).count() as u32;
                let y = chosen.iter().filter(|&&e| g.edges[e].2 == EdgeSymbol::Y).count() as u32;
                degrees.push((x, y));
            }
            return;
        }
        if g.edges.len() - i < g.n - 1 - chosen.len() {
            return;
        }
        // Prune choices that would close a cycle.
        let mut uf = UnionFind::<usize>::new(g.n);
        for &e in chosen.iter() {
            uf.union(g.edges[e].0, g.edges[e].1);
        }
        if !uf.equiv(g.edges[i].0, g.edges[i].1) {
            chosen.push(i);
            rec(g, i + 1, chosen, degrees);
            chosen.pop();
        }
        rec(g, i + 1, chosen, degrees);
    }
    rec(g, 0, &mut Vec::new(), &mut degrees);
    Order::infimum(degrees)
}

/// Order of a polynomial graph (infinite when disconnected).
///
/// Exhaustive for at most [`EXHAUSTIVE_TREE_LIMIT`] vertices, greedy above.
pub fn poly_graph_order(g: &PolyGraph) -> Order {
    if g.n <= EXHAUSTIVE_TREE_LIMIT {
        poly_graph_order_exhaustive(g)
    } else {
        poly_graph_order_greedy(g)
    }
}

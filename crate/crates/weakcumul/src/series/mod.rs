//! Truncated bivariate series, the order calculus, and polynomial graphs.

pub mod family;
pub mod order;
pub mod polygraph;
#[allow(clippy::module_inception)]
pub mod series;

pub use family::{
    kappa_delta_series, p_delta_minus_one, u_delta_series, FactorialFamily, FnFamily, SeriesFamily,
    SpecFamily,
};
pub use order::{dominates, order_cmp, Order, OrderRelation};
pub use polygraph::{
    build_lstar, poly_graph_order, poly_graph_order_exhaustive, poly_graph_order_greedy, EdgeSymbol,
    PolyGraph,
};
pub use series::{series_combine, series_order, CombineKind, Series};

//! Order calculus of truncated series, polynomial graphs and the moment series.

use num_traits::Signed;
use petgraph::unionfind::UnionFind;
use rand::Rng;
use weakcumul::cumulant::feray_sequence;
use weakcumul::generators::{random_poly_graph, random_series, random_spec, SpecBranch};
use weakcumul::models::rng_from_seed;
use weakcumul::rational::{pow, q, to_f64};
use weakcumul::series::{
    build_lstar, kappa_delta_series, p_delta_minus_one, poly_graph_order, poly_graph_order_exhaustive,
    poly_graph_order_greedy, series_order, EdgeSymbol, FactorialFamily, Order, SpecFamily,
};

fn branch(i: usize) -> SpecBranch {
    if i % 2 == 0 {
        SpecBranch::WithoutB
    } else {
        SpecBranch::WithB
    }
}

#[test]
fn basic_order_properties_on_random_series() {
    let cap = 8;
    let mut rng = rng_from_seed(11);
    for _ in 0..500 {
        let f = random_series(&mut rng, cap, cap / 2, true);
        let g = random_series(&mut rng, cap, cap / 2, true);
        let (of, og) = (series_order(&f), series_order(&g));
        assert!(series_order(&f.mul(&g).unwrap()).geq(of.add(og)), "product: {f:?} {g:?}");
        assert!(series_order(&f.add(&g).unwrap()).geq(of.inf(og)), "sum: {f:?} {g:?}");

        let h = random_series(&mut rng, cap, cap / 2, false);
        let r = h.reciprocal_one_plus().unwrap().sub(&weakcumul::series::Series::one(cap)).unwrap();
        assert_eq!(series_order(&r), series_order(&h), "reciprocal: {h:?}");
    }
}

#[test]
fn alternating_products_dominate_dependency_graph_order() {
    let mut rng = rng_from_seed(12);
    let mut checked = 0;
    for i in 0..100 {
        let spec = random_spec(&mut rng, 4, 8, branch(i)).unwrap();
        let family = SpecFamily::new(&spec, 10).unwrap();
        let lstar = build_lstar(&spec);
        for delta in 1u32..1 << spec.ell() {
            if delta.count_ones() < 2 {
                continue;
            }
            let p = p_delta_minus_one(&family, delta).unwrap();
            let graph_order = poly_graph_order(&lstar.induced(delta));
            assert!(series_order(&p).geq(graph_order), "spec {spec:?}, Δ = {delta:#b}");
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn dependency_graph_order_counts_components() {
    let mut rng = rng_from_seed(13);
    for i in 0..300 {
        let spec = random_spec(&mut rng, 5, 10, branch(i)).unwrap();
        let l = spec.ell() as u32;
        if let Order::Finite(d, d2) = poly_graph_order(&build_lstar(&spec)) {
            assert!(d + 1 >= spec.b_graph_components() as u32, "spec {spec:?}");
            assert!(d + d2 + 1 >= l, "spec {spec:?}");
        }
    }
}

#[test]
fn greedy_and_exhaustive_tree_orders_agree() {
    let mut rng = rng_from_seed(14);
    for _ in 0..300 {
        let n = rng.random_range(1..=7);
        let g = random_poly_graph(&mut rng, n, 0.5);
        assert_eq!(poly_graph_order_greedy(&g), poly_graph_order_exhaustive(&g), "{g:?}");
    }
}

/// If the blocks of a partition, glued by the weight-one edges, connect the
/// whole vertex set, the orders of the induced subgraphs add up to at least
/// the order of the graph.
#[test]
fn decomposition_over_connecting_partitions() {
    let mut rng = rng_from_seed(15);
    let mut checked = 0;
    while checked < 200 {
        let n = rng.random_range(2..=7);
        let g = random_poly_graph(&mut rng, n, 0.6);
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let mut uf = UnionFind::<usize>::new(n);
        for &(u, v, w) in g.edges() {
            if w == EdgeSymbol::One {
                uf.union(u, v);
            }
        }
        for u in 0..n {
            for v in 0..n {
                if labels[u] == labels[v] {
                    uf.union(u, v);
                }
            }
        }
        if (1..n).any(|v| !uf.equiv(0, v)) {
            continue;
        }
        let total = (0..3)
            .map(|b| (0..n).filter(|&v| labels[v] == b).fold(0u32, |m, v| m | (1 << v)))
            .filter(|&mask| mask != 0)
            .map(|mask| poly_graph_order(&g.induced(mask)))
            .fold(Order::Finite(0, 0), Order::add);
        assert!(total.geq(poly_graph_order(&g)), "{g:?} with blocks {labels:?}");
        checked += 1;
    }
}

#[test]
fn falling_factorial_families_have_high_order() {
    let mut rng = rng_from_seed(16);
    for _ in 0..200 {
        let weights: Vec<u32> = (0..4).map(|_| rng.random_range(0..=3)).collect();
        for reciprocal in [false, true] {
            for in_x in [true, false] {
                let fam = FactorialFamily { weights: weights.clone(), reciprocal, in_x, cap: 8 };
                for delta in 1u32..16 {
                    let need = delta.count_ones() - 1;
                    let ord = series_order(&p_delta_minus_one(&fam, delta).unwrap());
                    let floor = if in_x { Order::Finite(need, 0) } else { Order::Finite(0, need) };
                    assert!(ord.geq(floor), "weights {weights:?}, Δ = {delta:#b}, reciprocal {reciprocal}, x {in_x}");
                }
            }
        }
    }
}

/// The truncated `κ` series evaluated at `(x0, y0)` matches the exact
/// cumulant up to the geometric tail of the omitted degrees.
#[test]
fn kappa_series_matches_cumulant_up_to_tail() {
    let cap = 12;
    let mut rng = rng_from_seed(17);
    for i in 0..60 {
        let spec = random_spec(&mut rng, 4, 6, branch(i)).unwrap();
        let l = spec.ell();
        let family = SpecFamily::new(&spec, cap).unwrap();
        let full = (1u32 << l) - 1;
        let series = kappa_delta_series(&family, full).unwrap();
        let value = series.evaluate(spec.x0(), spec.y0());
        let exact = spec.exact_cumulant().unwrap();
        let big_l = spec.big_l() as f64;
        let r = big_l * big_l * to_f64(spec.x0()).max(to_f64(spec.y0()));
        assert!(r <= 0.5);
        let tail: f64 = (cap + 1..400).map(|k| (k as f64 + 1.0) * r.powi(k as i32)).sum();
        let scale = (l as f64).powi(2 * l as i32) * to_f64(&pow(spec.eta(), spec.big_l() as u32));
        let diff = to_f64(&(value - &exact).abs());
        assert!(diff <= scale * tail + 1e-300, "spec {spec:?}: diff {diff:e} > {:e}", scale * tail);
    }
}

#[test]
fn recursion_constants_are_subexponential() {
    let c = feray_sequence(8, &q(1)).unwrap();
    for (i, cr) in c.iter().enumerate() {
        let r = (i + 1) as f64;
        assert!(to_f64(cr) <= r.powf(6.0 * r), "C_{} = {cr}", i + 1);
    }
}

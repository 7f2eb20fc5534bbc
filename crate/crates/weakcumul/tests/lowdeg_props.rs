//! Exact `κ_{x,α}`, its bounds and the low-degree MMSE bound, checked against
//! a Wick-formula oracle that enumerates every latent configuration.

use itertools::Itertools;
use num_traits::{Signed, Zero};
use weakcumul::combinatorics::{alpha_summary, Cell, GridKind, MultiIndex};
use weakcumul::cumulant::{joint_cumulant, MomentTable};
use weakcumul::generators::random_multi_index;
use weakcumul::lowdeg::{
    enumerate_naive, enumerate_orbits, kappa_bound, kappa_exact, nullity_filter, sw_bound, theorem_bound, ModelParams,
};
use weakcumul::models::rng_from_seed;
use weakcumul::rational::{q, qfrac, to_f64};
use weakcumul::Q;

/// All label vectors of the latent prior, each with equal probability.
fn latents(params: &ModelParams) -> Vec<Vec<usize>> {
    match *params {
        ModelParams::Seriation { n, .. } => (0..n).permutations(n).collect(),
        ModelParams::Mfm { k, m, .. } => (0..m)
            .map(|_| (0..k).permutations(k).collect::<Vec<_>>())
            .multi_cartesian_product()
            .map(|perms| perms.concat())
            .collect(),
        ModelParams::Clustering { n, k, .. } => (0..n)
            .map(|_| 0..k)
            .multi_cartesian_product()
            .filter(|labels| (0..k).all(|c| labels.iter().filter(|&&l| l == c).count() == n / k))
            .collect(),
    }
}

/// Item and feature of a cell (`feature = 0` on the square grid).
fn item_feature(kind: GridKind, cell: &Cell) -> (usize, usize) {
    match (kind, *cell) {
        (_, Cell::Matrix { row, col }) => (row, col),
        (GridKind::Tensor { k: kk, .. }, Cell::Tensor { k, m, col }) => (m * kk + k, col),
        (_, Cell::Square { i, j }) => (i, j),
        _ => unreachable!(),
    }
}

/// Sum over perfect matchings of `items` of the product of `weight(a, b)`.
fn wick(items: &[usize], weight: &dyn Fn(usize, usize) -> bool) -> i64 {
    match items {
        [] => 1,
        [first, rest @ ..] => (0..rest.len())
            .filter(|&j| weight(*first, rest[j]))
            .map(|j| {
                let mut others = rest.to_vec();
                others.remove(j);
                wick(&others, weight)
            })
            .sum(),
    }
}

/// `κ(x, X_{c_1}, ..., X_{c_d})` from conditional moments averaged over all latents.
fn oracle_kappa(params: &ModelParams, alpha: &MultiIndex) -> Q {
    let kind = params.grid();
    let cells: Vec<Cell> = alpha.positions();
    let d = cells.len();
    let all = latents(params);
    let count = q(all.len() as i64);
    let anchors = kind.anchors();
    let moment = |mask: u32| -> Q {
        let with_x = mask & 1 == 1;
        let chosen: Vec<Cell> = (0..d).filter(|i| mask & (2 << i) != 0).map(|i| cells[i]).collect();
        let mut total = q(0);
        for labels in &all {
            let x = match *params {
                ModelParams::Seriation { rho, .. } => labels[0].abs_diff(labels[1]) <= rho,
                _ => labels[anchors[0]] == labels[anchors[1]],
            };
            if with_x && !x {
                continue;
            }
            let value = match *params {
                ModelParams::Seriation { rho, ref lambda, .. } => {
                    let inside = chosen.iter().all(|c| {
                        let (i, j) = item_feature(kind, c);
                        labels[i].abs_diff(labels[j]) <= rho
                    });
                    if inside {
                        weakcumul::rational::pow(lambda, chosen.len() as u32)
                    } else {
                        q(0)
                    }
                }
                _ => {
                    if chosen.len() % 2 == 1 {
                        q(0)
                    } else {
                        let idx: Vec<usize> = (0..chosen.len()).collect();
                        let same = |a: usize, b: usize| {
                            let (ia, fa) = item_feature(kind, &chosen[a]);
                            let (ib, fb) = item_feature(kind, &chosen[b]);
                            fa == fb && labels[ia] == labels[ib]
                        };
                        q(wick(&idx, &same)) * weakcumul::rational::pow(&params.lambda_sq(), (chosen.len() / 2) as u32)
                    }
                }
            };
            total += value;
        }
        total / &count
    };
    joint_cumulant(&MomentTable::from_fn(d + 1, moment).unwrap()).unwrap()
}

fn small_models() -> Vec<ModelParams> {
    vec![
        ModelParams::Mfm { k: 3, m: 2, p: 2, lambda_sq: qfrac(1, 3) },
        ModelParams::Mfm { k: 2, m: 3, p: 1, lambda_sq: qfrac(2, 5) },
        ModelParams::Clustering { n: 6, k: 3, p: 2, lambda_sq: qfrac(1, 2) },
        ModelParams::Clustering { n: 6, k: 2, p: 1, lambda_sq: qfrac(3, 4) },
        ModelParams::Seriation { n: 6, rho: 1, lambda: qfrac(3, 2) },
        ModelParams::Seriation { n: 5, rho: 2, lambda: qfrac(1, 2) },
    ]
}

#[test]
fn kappa_matches_wick_oracle_and_nullity() {
    let mut rng = rng_from_seed(31);
    for params in small_models() {
        let mut nonzero = 0;
        for _ in 0..40 {
            let alpha = random_multi_index(&mut rng, params.grid(), 4, 4).unwrap();
            let oracle = oracle_kappa(&params, &alpha);
            assert_eq!(kappa_exact(&params, &alpha).unwrap(), oracle, "{params:?} {alpha:?}");
            if nullity_filter(&params, &alpha) {
                assert!(oracle.is_zero(), "filtered but nonzero: {params:?} {alpha:?}");
            }
            nonzero += usize::from(!oracle.is_zero());
        }
        assert!(nonzero > 0, "no informative multi-index drawn for {params:?}");
    }
}

#[test]
fn kappa_respects_per_model_bounds() {
    let models = [
        ModelParams::Mfm { k: 32, m: 2, p: 2, lambda_sq: qfrac(1, 2) },
        ModelParams::Clustering { n: 96, k: 3, p: 2, lambda_sq: qfrac(1, 2) },
        ModelParams::Seriation { n: 40, rho: 2, lambda: qfrac(1, 2) },
    ];
    let mut rng = rng_from_seed(32);
    for params in models {
        let mut checked = 0;
        for _ in 0..300 {
            let alpha = random_multi_index(&mut rng, params.grid(), 4, 3).unwrap();
            if let Ok(bound) = kappa_bound(&params, &alpha) {
                let exact = to_f64(&kappa_exact(&params, &alpha).unwrap().abs());
                assert!(exact <= bound * (1.0 + 1e-12), "{params:?} {alpha:?}: {exact:e} > {bound:e}");
                checked += 1;
            }
        }
        assert!(checked >= 50, "only {checked} multi-indices met the hypotheses for {params:?}");
    }
}

#[test]
fn square_grid_degree_exceeds_node_count() {
    let mut rng = rng_from_seed(33);
    for _ in 0..500 {
        let alpha = random_multi_index(&mut rng, GridKind::Square { n: 12 }, 6, 8).unwrap();
        let s = alpha_summary(&alpha).unwrap();
        let m = s.support_with_anchors;
        assert!(m >= s.cc + 1);
        assert!(s.degree + s.cc + 1 >= m, "{alpha:?}");
        assert!(2 * s.degree + 2 >= m, "{alpha:?}");
    }
}

#[test]
fn orbits_partition_the_multi_indices() {
    let grids = [
        GridKind::Matrix { n: 4, p: 2 },
        GridKind::Tensor { k: 3, m: 3, p: 1 },
        GridKind::Tensor { k: 2, m: 2, p: 2 },
        GridKind::Square { n: 4 },
    ];
    for kind in grids {
        for d in 1..=3 {
            let orbits = enumerate_orbits(kind, d).unwrap();
            let naive = enumerate_naive(kind, d, 1 << 20).unwrap();
            let total: u128 = orbits.iter().map(|o| o.size).sum();
            assert_eq!(total, naive.len() as u128, "{kind:?}, d = {d}");
        }
    }
}

#[test]
fn low_degree_bound_is_monotone_and_above_closed_form() {
    let params = ModelParams::Mfm { k: 32, m: 2, p: 1, lambda_sq: q(1) / q(80) };
    let reports: Vec<f64> = (0..=2).map(|d| sw_bound(&params, d).unwrap().lower_bound).collect();
    assert!(reports.windows(2).all(|w| w[1] <= w[0] + 1e-15), "{reports:?}");
    for d in 1..=2 {
        if let Ok(theorem) = theorem_bound(&params, d) {
            assert!(reports[d] >= theorem, "D = {d}: {} < {theorem}", reports[d]);
        }
    }
    let null = ModelParams::Clustering { n: 6, k: 3, p: 2, lambda_sq: q(0) };
    let r = sw_bound(&null, 2).unwrap();
    assert_eq!(r.lower_bound, sw_bound(&null, 0).unwrap().lower_bound);
    assert!(r.mass_by_degree.iter().skip(1).all(|&m| m == 0.0));
}

//! Structural properties of joint cumulants and the general cumulant bound.

use num_traits::{Signed, Zero};
use proptest::prelude::*;
use weakcumul::cumulant::{joint_cumulant, MomentSpec, MomentTable};
use weakcumul::generators::{random_spec, SpecBranch};
use weakcumul::models::{latent_moment, rng_from_seed, Constraint, LatentModel};
use weakcumul::rational::{q, qfrac, to_f64};
use weakcumul::Q;

fn rational() -> impl Strategy<Value = Q> {
    (-20i64..=20, 1i64..=7).prop_map(|(a, b)| qfrac(a, b))
}

fn table(l: usize) -> impl Strategy<Value = Vec<Q>> {
    proptest::collection::vec(rational(), 1 << l)
}

fn from_values(l: usize, values: &[Q]) -> MomentTable<Q> {
    MomentTable::from_fn(l, |m| values[m as usize].clone()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Replacing the first variable by `a Z + b Z'` maps the cumulant to `a κ + b κ'`.
    #[test]
    fn multilinear_in_first_slot(l in 1usize..=4, a in rational(), b in rational(),
                                 v in table(4), w in table(4)) {
        let first = |m: u32, t: &[Q]| if m & 1 == 1 { t[m as usize].clone() } else { v[m as usize].clone() };
        let t1 = MomentTable::from_fn(l, |m| first(m, &v)).unwrap();
        let t2 = MomentTable::from_fn(l, |m| first(m, &w)).unwrap();
        let mix = MomentTable::from_fn(l, |m| {
            if m & 1 == 1 { &a * &v[m as usize] + &b * &w[m as usize] } else { v[m as usize].clone() }
        }).unwrap();
        let lhs = joint_cumulant(&mix).unwrap();
        let rhs = &a * joint_cumulant(&t1).unwrap() + &b * joint_cumulant(&t2).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    /// Moments factorizing across a nontrivial split give a zero cumulant.
    #[test]
    fn vanishes_on_independent_blocks(l in 2usize..=5, split_seed in any::<u32>(),
                                      v in table(5), w in table(5)) {
        let full = (1u32 << l) - 1;
        let mut s = split_seed & full;
        if s == 0 || s == full {
            s = 1;
        }
        let oracle = |m: u32| {
            let (ms, mt) = (m & s, m & !s & full);
            let left = if ms == 0 { q(1) } else { v[ms as usize].clone() };
            let right = if mt == 0 { q(1) } else { w[mt as usize].clone() };
            left * right
        };
        let t = MomentTable::from_fn(l, oracle).unwrap();
        prop_assert!(joint_cumulant(&t).unwrap().is_zero());
    }

    /// The cumulant is symmetric in its arguments.
    #[test]
    fn symmetric_under_relabelling(l in 1usize..=5, v in table(5),
                                   perm in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle()) {
        let sigma: Vec<usize> = perm.into_iter().filter(|&i| i < l).collect();
        let t = from_values(l, &v);
        let relabel = |m: u32| (0..l).filter(|&i| m & (1 << i) != 0).fold(0u32, |acc, i| acc | (1 << sigma[i]));
        let moved = MomentTable::from_fn(l, |m| v[relabel(m) as usize].clone()).unwrap();
        prop_assert_eq!(joint_cumulant(&t).unwrap(), joint_cumulant(&moved).unwrap());
    }

    /// With `x0 = y0 = 0` quasi-factorized moments are products and the
    /// cumulant of two or more variables vanishes; it grows continuously from 0.
    #[test]
    fn quasi_factorized_limit(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let spec = random_spec(&mut rng, 4, 8, SpecBranch::WithB).unwrap();
        prop_assume!(spec.ell() >= 2);
        let rebuild = |x0: Q, y0: Q| MomentSpec::new(spec.eta().clone(), x0, y0, spec.i_sets().to_vec(),
            spec.a_sets().to_vec(), spec.b_sets().to_vec()).unwrap();
        prop_assert!(rebuild(q(0), q(0)).exact_cumulant().unwrap().is_zero());
        let mut previous = f64::INFINITY;
        for e in [2i64, 4, 6, 8] {
            let t = qfrac(1, 10i64.pow(e as u32));
            let k = to_f64(&rebuild(&t * spec.x0(), &t * spec.y0()).exact_cumulant().unwrap().abs());
            prop_assert!(k <= previous * (1.0 + 1e-12));
            previous = k;
        }
        prop_assert!(previous < 1e-7);
    }
}

/// `|κ| <= core_bound` on 200 random specs, half in each branch.
#[test]
fn core_bound_holds_on_random_specs() {
    let mut rng = rng_from_seed(0x5eed);
    for i in 0..200 {
        let branch = if i % 2 == 0 { SpecBranch::WithoutB } else { SpecBranch::WithB };
        let spec = random_spec(&mut rng, 4, 8, branch).unwrap();
        let exact = to_f64(&spec.exact_cumulant().unwrap().abs());
        let bound = spec.core_bound().unwrap();
        assert!(exact <= bound * (1.0 + 1e-12), "spec {spec:?}: |κ| = {exact:e} > {bound:e}");
    }
}

/// Expanding band indicators over label pairs and summing the cumulants of
/// the fixed-label indicators reproduces the cumulant of the band indicators.
#[test]
fn expansion_over_label_assignments() {
    let n = 5;
    let rho = 1;
    let model = LatentModel::Permutation { n };
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| u != v && u.abs_diff(v) <= rho)
        .collect();
    let cases: [&[(usize, usize)]; 3] = [&[(0, 1), (1, 2)], &[(0, 1), (2, 3), (1, 3)], &[(0, 1), (0, 1)]];
    for items in cases {
        let l = items.len();
        let band = |m: u32| {
            let cs: Vec<Constraint> = (0..l)
                .filter(|t| m & (1 << t) != 0)
                .map(|t| Constraint::Band { a: items[t].0, b: items[t].1, rho })
                .collect();
            latent_moment(&model, &cs).unwrap()
        };
        let lhs = joint_cumulant(&MomentTable::from_fn(l, band).unwrap()).unwrap();

        let mut rhs = q(0);
        let mut choice = vec![0usize; l];
        'outer: loop {
            let fixed = |m: u32| {
                let cs: Vec<Constraint> = (0..l)
                    .filter(|t| m & (1 << t) != 0)
                    .flat_map(|t| {
                        let (u, v) = pairs[choice[t]];
                        [Constraint::Fixed(items[t].0, u), Constraint::Fixed(items[t].1, v)]
                    })
                    .collect();
                latent_moment(&model, &cs).unwrap()
            };
            rhs += joint_cumulant(&MomentTable::from_fn(l, fixed).unwrap()).unwrap();
            for c in choice.iter_mut() {
                *c += 1;
                if *c < pairs.len() {
                    continue 'outer;
                }
                *c = 0;
            }
            break;
        }
        assert_eq!(lhs, rhs, "items {items:?}");
    }
}

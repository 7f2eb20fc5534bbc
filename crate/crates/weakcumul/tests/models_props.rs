//! Latent moments, error metrics and sampler properties.

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;
use weakcumul::generators::random_constraints;
use weakcumul::models::clustering::balanced_labels;
use weakcumul::models::{
    err_part_exact, err_perm_exact, exhaustive_latent_probability, latent_moment, partnership, partnership_tuple, phi,
    random_permutation, rng_from_seed, sample_mfm_seeded, sample_seriation, sample_seriation_seeded, LatentModel,
    MfmConfig, PlantedInstance, SeriationConfig,
};
use weakcumul::rational::q;
use weakcumul::Q;

fn square(x: &Q) -> Q {
    x * x
}

#[test]
fn closed_form_moments_match_enumeration() {
    let models = [
        LatentModel::Permutation { n: 7 },
        LatentModel::MultiPermutation { k: 3, m: 2 },
        LatentModel::MultiPermutation { k: 2, m: 3 },
        LatentModel::Balanced { n: 6, k: 3 },
        LatentModel::Balanced { n: 6, k: 2 },
    ];
    let mut rng = rng_from_seed(21);
    for model in models {
        for _ in 0..80 {
            let cs = random_constraints(&mut rng, &model, 4);
            assert_eq!(
                latent_moment(&model, &cs).unwrap(),
                exhaustive_latent_probability(&model, &cs).unwrap(),
                "{model:?} {cs:?}"
            );
        }
    }
}

#[test]
fn partition_metric_inequalities() {
    let mut rng = rng_from_seed(22);
    for _ in 0..300 {
        let k = rng.random_range(2..=4);
        let n = k * rng.random_range(1..=4);
        let truth = balanced_labels(n, k, &mut rng);
        let est = balanced_labels(n, k, &mut rng);
        let err = err_part_exact(&est, &truth, k).unwrap();
        let dist = q(partnership(&est).squared_distance(&partnership(&truth)).unwrap() as i64);
        let (nq, kq) = (q(n as i64), q(k as i64));
        if n >= 2 {
            assert!(&dist / (&nq * (&nq - q(1))) <= q(2) * &err, "{est:?} vs {truth:?}");
        }
        let rhs = Q::one() - &kq * &dist / (q(2) * &nq * &nq);
        assert!(square(&(Q::one() - &err)) <= rhs, "{est:?} vs {truth:?}");
    }
}

#[test]
fn permutation_metric_inequality_and_gauge() {
    let mut rng = rng_from_seed(23);
    for _ in 0..300 {
        let k = rng.random_range(1..=5);
        let m = rng.random_range(1..=4);
        let truth: Vec<Vec<usize>> = (0..m).map(|_| random_permutation(k, &mut rng)).collect();
        let est: Vec<Vec<usize>> = (0..m).map(|_| random_permutation(k, &mut rng)).collect();
        let err = err_perm_exact(&est, &truth).unwrap();
        let dist = q(partnership_tuple(&est).squared_distance(&partnership_tuple(&truth)).unwrap() as i64);
        let (kq, mq) = (q(k as i64), q(m as i64));
        assert!(square(&(Q::one() - &err)) <= Q::one() - dist / (q(2) * kq * &mq * &mq));

        let psi = random_permutation(k, &mut rng);
        let relabelled: Vec<Vec<usize>> = est.iter().map(|p| p.iter().map(|&v| psi[v]).collect()).collect();
        assert_eq!(err_perm_exact(&relabelled, &truth).unwrap(), err);
        let third: Vec<Vec<usize>> = (0..m).map(|_| random_permutation(k, &mut rng)).collect();
        let via = err_perm_exact(&est, &third).unwrap() + err_perm_exact(&third, &truth).unwrap();
        assert!(err <= via);
        assert!(err >= Q::zero() && err <= Q::one());
    }
}

#[test]
fn seriation_target_mean_matches_phi() {
    let cfg = SeriationConfig { n: 6, rho: 2, lambda: 1.0, sigma: 0.0 };
    let mut rng = rng_from_seed(24);
    let draws = 100_000;
    let hits = (0..draws).filter(|_| sample_seriation(&cfg, &mut rng).unwrap().x[1] > 0.5).count();
    let mean = hits as f64 / draws as f64;
    let se = (mean * (1.0 - mean) / draws as f64).sqrt();
    let expected = phi(6, 2).unwrap();
    assert!((mean - expected).abs() <= 4.0 * se, "mean {mean} vs φ = {expected} (se {se})");
}

#[test]
fn mfm_observations_are_centred() {
    let cfg = MfmConfig { k: 2, m: 2, p: 1, sigma: 1.0, delta_bar_sq: 1.0 };
    let draws = 20_000;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for seed in 0..draws {
        let y = sample_mfm_seeded(&cfg, seed).unwrap().y.data[0];
        sum += y;
        sum_sq += y * y;
    }
    let mean = sum / draws as f64;
    let se = ((sum_sq / draws as f64 - mean * mean) / draws as f64).sqrt();
    assert!(mean.abs() <= 4.0 * se, "mean {mean} (se {se})");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn seeded_instances_round_trip(seed in any::<u64>(), n in 2usize..8) {
        let cfg = SeriationConfig { n, rho: 1, lambda: 2.0, sigma: 1.0 };
        let a = sample_seriation_seeded(&cfg, seed).unwrap();
        prop_assert_eq!(&a, &sample_seriation_seeded(&cfg, seed).unwrap());
        let planted = PlantedInstance::Seriation(a);
        prop_assert_eq!(PlantedInstance::from_json(&planted.to_json()).unwrap(), planted);
    }
}

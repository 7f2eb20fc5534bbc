//! Low-degree MMSE lower bound `Var(x) - Σ_{0<|α|<=D} κ_{x,α}²/α!` and the
//! closed-form theorem bounds.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::kappa::{kappa_exact_cached, nullity_filter, MomentCache};
use super::orbits::{enumerate_naive, enumerate_orbits};
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::rational::{to_f64, Q};

/// Largest degree accepted by [`sw_bound`].
pub const MAX_SW_DEGREE: usize = 4;
/// Largest number of non-null multi-indices accepted by [`sw_bound`].
pub const MAX_SW_TERMS: u128 = 10_000_000;

/// Result of [`sw_bound`], in units of the indicator `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwReport {
    pub model: String,
    pub params: BTreeMap<String, f64>,
    #[serde(rename = "D")]
    pub degree: usize,
    /// `Var(x) - Σ κ²/α!`.
    pub lower_bound: f64,
    /// `mass_by_degree[d] = Σ_{|α|=d} κ²/α!` (entry `0` is `0`).
    pub mass_by_degree: Vec<f64>,
    /// Number of multi-indices whose cumulant was computed.
    pub n_terms: u64,
    /// Number of multi-indices skipped by the nullity rules.
    pub filtered_terms: u64,
    #[serde(skip)]
    pub lower_bound_exact: Q,
    #[serde(skip)]
    pub variance_exact: Q,
}

impl SwReport {
    /// JSON form `{model, params, D, lower_bound, mass_by_degree, n_terms, filtered_terms}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports always serialize")
    }
}

/// Exact `Var(x)`.
pub fn target_variance(params: &ModelParams, cache: &MomentCache) -> Result<Q> {
    let mean = cache.moment(&[params.target().constraint])?;
    Ok(mean.clone() - mean.clone() * mean)
}

/// Low-degree lower bound with orbit-reduced enumeration of `α` (`D <= 4`).
pub fn sw_bound(params: &ModelParams, degree: usize) -> Result<SwReport> {
    sw_bound_with(params, degree, MAX_SW_TERMS)
}

/// [`sw_bound`] with an explicit cap on the number of non-null multi-indices.
pub fn sw_bound_with(params: &ModelParams, degree: usize, max_terms: u128) -> Result<SwReport> {
    params.validate()?;
    if degree > MAX_SW_DEGREE {
        return Err(Error::size("low-degree bound degree D", degree as u128, MAX_SW_DEGREE as u128));
    }
    let cache = MomentCache::new(params.latent());
    let variance = target_variance(params, &cache)?;
    let kind = params.grid();
    let mut masses = vec![Q::zero()];
    let (mut n_terms, mut filtered) = (0u128, 0u128);
    for d in 1..=degree {
        let orbits = enumerate_orbits(kind, d)?;
        let mut live = Vec::new();
        for orbit in orbits {
            if nullity_filter(params, &orbit.alpha) {
                filtered += orbit.size;
            } else {
                n_terms += orbit.size;
                live.push(orbit);
            }
        }
        if n_terms > max_terms {
            return Err(Error::size("non-null multi-indices", n_terms, max_terms));
        }
        let terms: Vec<Result<Q>> = live
            .par_iter()
            .map(|orbit| {
                let kappa = kappa_exact_cached(params, &orbit.alpha, &cache)?;
                Ok(Q::from_integer(orbit.size.into()) * &kappa * &kappa / Q::from_integer(orbit.alpha.factorial().into()))
            })
            .collect();
        let mut mass = Q::zero();
        for t in terms {
            mass += t?;
        }
        masses.push(mass);
    }
    let total: Q = masses.iter().cloned().fold(Q::zero(), |a, b| a + b);
    let lower = variance.clone() - total;
    Ok(SwReport {
        model: params.kind().name().to_string(),
        params: params.to_map(),
        degree,
        lower_bound: to_f64(&lower),
        mass_by_degree: masses.iter().map(to_f64).collect(),
        n_terms: n_terms as u64,
        filtered_terms: filtered as u64,
        lower_bound_exact: lower,
        variance_exact: variance,
    })
}

/// The same bound by plain enumeration of every `α` (tiny grids; at most `cap` multi-indices per degree).
pub fn sw_bound_naive(params: &ModelParams, degree: usize, cap: u128) -> Result<Q> {
    params.validate()?;
    let cache = MomentCache::new(params.latent());
    let mut lower = target_variance(params, &cache)?;
    for d in 1..=degree {
        for alpha in enumerate_naive(params.grid(), d, cap)? {
            let kappa = kappa_exact_cached(params, &alpha, &cache)?;
            lower -= &kappa * &kappa / Q::from_integer(alpha.factorial().into());
        }
    }
    Ok(lower)
}

/// Closed-form lower bound on `MMSE_{<=D}` from the low-degree theorems.
///
/// - Feature matching: needs `K >= 2(D+2)²` and `ζ = 64 D^40 λ⁴ p max(1, M/K) < 1`;
///   returns `1/K - (1 + 64 (D+1) D^36 ζ/(1-√ζ))/K²`.
/// - Clustering: needs `p >= n/K²`, `n >= max(2(D+2)² K, (D+2)^4)`, `K >= D+2` and
///   `ζ = λ⁴ p D^22 (D+2)² max(1, n/K²) < 1`; returns `1/K - (1 + 18 D^21 ζ/(1-√ζ))/K²`.
/// - Seriation (matrix units, risk `‖X̂ - X‖²/n²`): needs `n >= 2(2D+2)²` and
///   `ζ = 2^12 λ² (D+1)^42 max(1, 4ρ²/n) < 1`; with `t = max(ζ, 1/n)` returns
///   `λ² n/(n-1) [φ(1-φ) - 2^18 ρ² (D+1)^44 t/((n-1)²(1-t))]`.
pub fn theorem_bound(params: &ModelParams, degree: usize) -> Result<f64> {
    params.validate()?;
    let d = degree as f64;
    let lambda_sq = to_f64(&params.lambda_sq());
    let pre = |ok: bool, what: String| if ok { Ok(()) } else { Err(Error::Precondition(what)) };
    match *params {
        ModelParams::Mfm { k, m, p, .. } => {
            let need = 2 * (degree + 2) * (degree + 2);
            pre(k >= need, format!("K >= 2(D+2)^2 fails ({k} < {need})"))?;
            let kf = k as f64;
            let zeta = 64.0 * d.powi(40) * lambda_sq * lambda_sq * p as f64 * (m as f64 / kf).max(1.0);
            pre(zeta < 1.0, format!("zeta = {zeta} < 1 fails"))?;
            Ok(1.0 / kf - (1.0 + 64.0 * (d + 1.0) * d.powi(36) * zeta / (1.0 - zeta.sqrt())) / (kf * kf))
        }
        ModelParams::Clustering { n, k, p, .. } => {
            let (nf, kf) = (n as f64, k as f64);
            pre(p as f64 >= nf / (kf * kf), format!("p >= n/K^2 fails ({p} < {})", nf / (kf * kf)))?;
            let need = (2 * (degree + 2) * (degree + 2) * k).max((degree + 2).pow(4));
            pre(n >= need, format!("n >= max(2(D+2)^2 K, (D+2)^4) fails ({n} < {need})"))?;
            pre(k >= degree + 2, format!("K >= D+2 fails ({k} < {})", degree + 2))?;
            let zeta = lambda_sq * lambda_sq * p as f64 * d.powi(22) * (d + 2.0).powi(2) * (nf / (kf * kf)).max(1.0);
            pre(zeta < 1.0, format!("zeta = {zeta} < 1 fails"))?;
            Ok(1.0 / kf - (1.0 + 18.0 * d.powi(21) * zeta / (1.0 - zeta.sqrt())) / (kf * kf))
        }
        ModelParams::Seriation { n, rho, .. } => {
            let need = 2 * (2 * degree + 2) * (2 * degree + 2);
            pre(n >= need, format!("n >= 2(2D+2)^2 fails ({n} < {need})"))?;
            let (nf, rf) = (n as f64, rho as f64);
            let zeta = 2f64.powi(12) * lambda_sq * (d + 1.0).powi(42) * (4.0 * rf * rf / nf).max(1.0);
            pre(zeta < 1.0, format!("zeta = {zeta} < 1 fails"))?;
            let phi = crate::models::phi(n, rho)?;
            let t = zeta.max(1.0 / nf);
            let correction = 2f64.powi(18) * rf * rf / ((nf - 1.0) * (nf - 1.0)) * (d + 1.0).powi(44) * t / (1.0 - t);
            Ok(lambda_sq * nf / (nf - 1.0) * (phi * (1.0 - phi) - correction))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_f64, q, qfrac};

    #[test]
    fn degree_zero_is_variance() {
        let params = ModelParams::Mfm { k: 4, m: 2, p: 1, lambda_sq: q(1) };
        let r = sw_bound(&params, 0).unwrap();
        assert_eq!(r.lower_bound_exact, qfrac(3, 16));
        assert_eq!(r.lower_bound, 0.1875);
        let json = r.to_json();
        for key in ["\"model\"", "\"params\"", "\"D\"", "\"lower_bound\"", "\"mass_by_degree\"", "\"n_terms\"", "\"filtered_terms\""] {
            assert!(json.contains(key), "{json}");
        }
    }

    #[test]
    fn null_signal_keeps_variance() {
        let params = ModelParams::Clustering { n: 6, k: 3, p: 2, lambda_sq: q(0) };
        let r = sw_bound(&params, 2).unwrap();
        assert_eq!(r.lower_bound_exact, r.variance_exact);
        let ser = ModelParams::Seriation { n: 5, rho: 1, lambda: q(0) };
        let r = sw_bound(&ser, 2).unwrap();
        assert_eq!(r.lower_bound_exact, qfrac(6, 25));
    }

    #[test]
    fn orbit_sum_matches_naive() {
        let cases = [
            ModelParams::Mfm { k: 3, m: 2, p: 1, lambda_sq: qfrac(1, 3) },
            ModelParams::Mfm { k: 2, m: 3, p: 2, lambda_sq: qfrac(1, 2) },
            ModelParams::Clustering { n: 4, k: 2, p: 2, lambda_sq: qfrac(1, 2) },
            ModelParams::Seriation { n: 4, rho: 1, lambda: qfrac(1, 3) },
        ];
        for params in cases {
            for degree in 1..=3 {
                let fast = sw_bound(&params, degree).unwrap().lower_bound_exact;
                let slow = sw_bound_naive(&params, degree, 100_000).unwrap();
                assert_eq!(fast, slow, "{params:?} D={degree}");
            }
        }
    }

    #[test]
    fn seriation_small_instance() {
        let params = ModelParams::Seriation { n: 6, rho: 1, lambda: qfrac(1, 10) };
        let r = sw_bound(&params, 2).unwrap();
        let phi = crate::models::phi_exact(6, 1).unwrap();
        let variance = phi.clone() * (q(1) - phi);
        assert_eq!(r.variance_exact, variance);
        assert!(r.lower_bound_exact < variance);
        assert!(r.lower_bound_exact > Q::zero());
    }

    #[test]
    fn monotone_in_degree() {
        let params = ModelParams::Clustering { n: 6, k: 3, p: 2, lambda_sq: qfrac(1, 2) };
        let mut last = sw_bound(&params, 0).unwrap().lower_bound_exact;
        for d in 1..=4 {
            let v = sw_bound(&params, d).unwrap().lower_bound_exact;
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn theorem_examples() {
        let lambda_sq = (0.01f64 / 64.0).sqrt();
        let params = ModelParams::Mfm { k: 32, m: 2, p: 1, lambda_sq: from_f64(lambda_sq).unwrap() };
        let v = theorem_bound(&params, 1).unwrap();
        let expected = 1.0 / 32.0 - (1.0 + 128.0 * 0.01 / 0.9) / 1024.0;
        assert!((v - expected).abs() < 1e-12);
        assert!((v - 0.0288845).abs() < 1e-6);
        let tiny = ModelParams::Mfm { k: 32, m: 2, p: 1, lambda_sq: qfrac(1, 1 << 40) };
        assert!((theorem_bound(&tiny, 1).unwrap() - (1.0 / 32.0 - 1.0 / 1024.0)).abs() < 1e-9);
        assert!(matches!(theorem_bound(&ModelParams::Mfm { k: 10, m: 2, p: 1, lambda_sq: q(0) }, 1), Err(Error::Precondition(_))));
        assert!(matches!(theorem_bound(&ModelParams::Mfm { k: 32, m: 2, p: 1, lambda_sq: q(1) }, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn seriation_theorem_uses_inverse_n_floor() {
        let n = 40usize;
        let params = ModelParams::Seriation { n, rho: 1, lambda: qfrac(1, 1 << 40) };
        let v = theorem_bound(&params, 1).unwrap();
        let phi = crate::models::phi(n, 1).unwrap();
        let t = 1.0 / n as f64;
        let l2 = 2f64.powi(-80);
        let expected = l2 * 40.0 / 39.0 * (phi * (1.0 - phi) - 2f64.powi(18) / (39.0 * 39.0) * 2f64.powi(44) * t / (1.0 - t));
        assert!((v / expected - 1.0).abs() < 1e-12);
    }
}

//! Families of series indexed by subsets: `u_Δ`, `P_Δ[u] - 1` and `κ_Δ`.

use std::collections::HashMap;

use num_traits::{One, Zero};

use super::series::Series;
use crate::combinatorics::partition::{for_each_partition_of_mask, mobius_weight_for_blocks};
use crate::cumulant::MomentSpec;
use crate::error::{Error, Result};
use crate::rational::{q, Q};

/// Largest cap for the moment-series family of a [`MomentSpec`].
pub const MAX_U_CAP: usize = 16;
/// Largest `|Δ|` for `κ_Δ` and `P_Δ` series.
pub const MAX_DELTA_SIZE: usize = 6;

/// A map from subsets `Δ` (bitmasks) to truncated series sharing one cap.
pub trait SeriesFamily {
    /// Shared truncation cap.
    fn cap(&self) -> usize;
    /// The series attached to the subset `delta` (nonempty).
    fn series(&self, delta: u32) -> Result<Series>;
}

/// `1 / (1 - a z)` truncated, in the variable `x` (`in_x`) or `y`.
fn geometric(cap: usize, a: i64, in_x: bool) -> Series {
    let mut f = Series::zero(cap);
    let mut c = Q::one();
    for s in 0..=cap {
        if in_x {
            f.set_coeff(s, 0, c.clone());
        } else {
            f.set_coeff(0, s, c.clone());
        }
        c *= q(a);
    }
    f
}

/// `1 - a z` in the variable `x` (`in_x`) or `y`.
fn linear(cap: usize, a: i64, in_x: bool) -> Series {
    let mut f = Series::one(cap);
    if in_x {
        f.set_coeff(1, 0, q(-a));
    } else {
        f.set_coeff(0, 1, q(-a));
    }
    f
}

/// The moment series of a [`MomentSpec`]:
/// `u_Δ = η^{|I_Δ|} prod_j prod_{a < |I_Δ ∩ A_j|} (1 - a x)^{-1} prod_i prod_{b < |I_Δ ∩ B_i|} (1 - b y)`.
pub fn u_delta_series(spec: &MomentSpec, delta: u32, cap: usize) -> Result<Series> {
    if cap > MAX_U_CAP {
        return Err(Error::size("series cap", cap as u128, MAX_U_CAP as u128));
    }
    if delta == 0 {
        return Ok(Series::one(cap));
    }
    let size = spec.i_delta(delta).len();
    let (a_counts, b_counts) = spec.intersection_counts(delta);
    let mut f = Series::constant(cap, num_traits::pow(spec.eta().clone(), size));
    for c in a_counts {
        for a in 1..c {
            f = f.mul(&geometric(cap, a as i64, true))?;
        }
    }
    for c in b_counts {
        for b in 1..c {
            f = f.mul(&linear(cap, b as i64, false))?;
        }
    }
    Ok(f)
}

/// The family `Δ ↦ u_Δ` of a [`MomentSpec`].
#[derive(Debug, Clone)]
pub struct SpecFamily<'a> {
    spec: &'a MomentSpec,
    cap: usize,
}

impl<'a> SpecFamily<'a> {
    /// Family of moment series truncated at `cap <= 16`.
    pub fn new(spec: &'a MomentSpec, cap: usize) -> Result<Self> {
        if cap > MAX_U_CAP {
            return Err(Error::size("series cap", cap as u128, MAX_U_CAP as u128));
        }
        Ok(Self { spec, cap })
    }
}

impl SeriesFamily for SpecFamily<'_> {
    fn cap(&self) -> usize {
        self.cap
    }
    fn series(&self, delta: u32) -> Result<Series> {
        u_delta_series(self.spec, delta, self.cap)
    }
}

/// Falling-factorial families: for weights `a_i`, with `A = sum_{i in Δ} a_i`,
/// the product `(1 - z)(1 - 2z)...(1 - (A-1) z)` or its reciprocal
/// (both equal to `1` when `A <= 1`), in `z = x` or `z = y`.
#[derive(Debug, Clone)]
pub struct FactorialFamily {
    /// Weights `a_i` of the ground elements.
    pub weights: Vec<u32>,
    /// Use the reciprocal of the product.
    pub reciprocal: bool,
    /// Variable `x` (true) or `y` (false).
    pub in_x: bool,
    /// Truncation cap.
    pub cap: usize,
}

impl SeriesFamily for FactorialFamily {
    fn cap(&self) -> usize {
        self.cap
    }
    fn series(&self, delta: u32) -> Result<Series> {
        let total: u32 = (0..self.weights.len())
            .filter(|i| delta & (1 << i) != 0)
            .map(|i| self.weights[i])
            .sum();
        let mut f = Series::one(self.cap);
        for k in 1..total as i64 {
            let factor = if self.reciprocal {
                geometric(self.cap, k, self.in_x)
            } else {
                linear(self.cap, k, self.in_x)
            };
            f = f.mul(&factor)?;
        }
        Ok(f)
    }
}

/// A family given by a closure.
pub struct FnFamily<F> {
    /// Truncation cap.
    pub cap: usize,
    /// Series for each subset.
    pub f: F,
}

impl<F: Fn(u32) -> Result<Series>> SeriesFamily for FnFamily<F> {
    fn cap(&self) -> usize {
        self.cap
    }
    fn series(&self, delta: u32) -> Result<Series> {
        (self.f)(delta)
    }
}

fn check_delta(delta: u32) -> Result<()> {
    let size = delta.count_ones() as usize;
    if size == 0 {
        return Err(Error::Domain("Δ must be nonempty".into()));
    }
    if size > MAX_DELTA_SIZE {
        return Err(Error::size("|Δ|", size as u128, MAX_DELTA_SIZE as u128));
    }
    Ok(())
}

fn submasks(delta: u32) -> impl Iterator<Item = u32> {
    // All submasks of delta, including 0 and delta itself.
    let mut sub = delta;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = sub;
        if sub == 0 {
            done = true;
        } else {
            sub = (sub - 1) & delta;
        }
        Some(out)
    })
}

/// `P_Δ[u] - 1` with `P_Δ[u] = prod_{δ ⊆ Δ} u_δ^{(-1)^{|Δ| - |δ|}}` and `u_∅ = 1`.
///
/// For `|Δ| = 1` the alternating product is literally `u_Δ / u_∅ = u_Δ`, so the
/// result is `u_Δ - 1` (zero exactly when `u_Δ = 1`).
pub fn p_delta_minus_one(family: &impl SeriesFamily, delta: u32) -> Result<Series> {
    check_delta(delta)?;
    let cap = family.cap();
    let size = delta.count_ones();
    let mut numerator = Series::one(cap);
    let mut denominator = Series::one(cap);
    for sub in submasks(delta) {
        if sub == 0 {
            continue;
        }
        let u = family.series(sub)?;
        if u.constant_term().is_zero() {
            return Err(Error::Domain(format!("u for subset {sub:#b} has zero constant term")));
        }
        if (size - sub.count_ones()) % 2 == 0 {
            numerator = numerator.mul(&u)?;
        } else {
            denominator = denominator.mul(&u)?;
        }
    }
    numerator.mul(&denominator.inverse()?)?.sub(&Series::one(cap))
}

/// `κ_Δ = sum_{G partition of Δ} m(G) prod_{δ in G} u_δ`, truncated.
pub fn kappa_delta_series(family: &impl SeriesFamily, delta: u32) -> Result<Series> {
    check_delta(delta)?;
    let cap = family.cap();
    let mut cache: HashMap<u32, Series> = HashMap::new();
    for sub in submasks(delta).filter(|&s| s != 0) {
        cache.insert(sub, family.series(sub)?);
    }
    let mut total = Series::zero(cap);
    let mut err = None;
    for_each_partition_of_mask(delta, |blocks| {
        if err.is_some() {
            return;
        }
        let mut prod = Series::one(cap);
        for b in blocks {
            match prod.mul(&cache[b]) {
                Ok(p) => prod = p,
                Err(e) => {
                    err = Some(e);
                    return;
                }
            }
        }
        let w = q(mobius_weight_for_blocks(blocks.len()));
        total = total.add(&prod.scale(&w)).expect("shared cap");
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qfrac;
    use crate::series::order::Order;

    fn permutation_spec(n: usize) -> MomentSpec {
        MomentSpec::new(
            qfrac(1, n as i64),
            qfrac(1, n as i64),
            q(0),
            vec![vec![0], vec![1]],
            vec![(0..n).collect()],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn u_examples() {
        let spec = permutation_spec(4);
        assert_eq!(u_delta_series(&spec, 0, 8).unwrap(), Series::one(8));
        let one_a = MomentSpec::new(q(1), q(0), q(0), vec![vec![0], vec![1]], vec![vec![0, 1]], vec![]).unwrap();
        let u = u_delta_series(&one_a, 0b11, 8).unwrap();
        for s in 0..=8 {
            assert_eq!(u.coeff(s, 0), q(1));
        }
        assert!(u_delta_series(&spec, 1, 17).is_err());
    }

    #[test]
    fn u_evaluates_to_closed_form() {
        let spec = MomentSpec::new(
            qfrac(1, 3),
            qfrac(1, 40),
            qfrac(1, 30),
            vec![vec![0, 1], vec![2], vec![3, 4]],
            vec![vec![0, 2, 3], vec![1, 4]],
            vec![vec![0, 2, 4]],
        )
        .unwrap();
        for delta in 1..8u32 {
            let u = u_delta_series(&spec, delta, 12).unwrap();
            let exact = crate::rational::to_f64(&spec.mixed_moment(delta).unwrap());
            let approx = u.evaluate_f64(1.0 / 40.0, 1.0 / 30.0);
            assert!((exact - approx).abs() < 1e-15, "{delta}: {exact} vs {approx}");
        }
    }

    #[test]
    fn p_delta_examples() {
        let ones = FnFamily { cap: 6, f: |_| Ok(Series::one(6)) };
        assert!(p_delta_minus_one(&ones, 0b1).unwrap().is_zero());
        // factorized family: u_δ = g(δ ∩ {0}) h(δ ∩ {1})
        let g = Series::one(6).add(&Series::x(6)).unwrap();
        let h = Series::one(6).sub(&Series::y(6).scale(&q(3))).unwrap();
        let fam = FnFamily {
            cap: 6,
            f: |d: u32| {
                let mut s = Series::one(6);
                if d & 1 != 0 {
                    s = s.mul(&g)?;
                }
                if d & 2 != 0 {
                    s = s.mul(&h)?;
                }
                Ok(s)
            },
        };
        assert!(p_delta_minus_one(&fam, 0b11).unwrap().is_zero());
        assert!(kappa_delta_series(&fam, 0b11).unwrap().is_zero());
        // falling factorial family with a = (1, 1): P - 1 = (1 - x) - 1 = -x
        let v = FactorialFamily { weights: vec![1, 1], reciprocal: false, in_x: true, cap: 6 };
        let p = p_delta_minus_one(&v, 0b11).unwrap();
        assert_eq!(p, Series::x(6).neg());
        assert!(p.order().geq(Order::Finite(1, 0)));
    }

    #[test]
    fn kappa_examples() {
        let spec = permutation_spec(4);
        let fam = SpecFamily::new(&spec, 12).unwrap();
        assert_eq!(kappa_delta_series(&fam, 0b1).unwrap(), fam.series(0b1).unwrap());
        let kappa = kappa_delta_series(&fam, 0b11).unwrap();
        let value = kappa.evaluate_f64(0.25, 0.0);
        let exact = 1.0 / (16.0 * 3.0);
        // The truncated tail is exactly (1/16) sum_{s > 12} 4^{-s}.
        let tail = (1.0 / 16.0) * 0.25f64.powi(13) / 0.75;
        assert!((exact - value - tail).abs() < 1e-15, "{value} vs {exact}");
        let fam16 = SpecFamily::new(&spec, 16).unwrap();
        let value16 = kappa_delta_series(&fam16, 0b11).unwrap().evaluate_f64(0.25, 0.0);
        assert!((value16 - exact).abs() < 1e-9);
        let exact_q = spec.exact_cumulant().unwrap();
        assert_eq!(exact_q, qfrac(1, 48));
    }

    #[test]
    fn delta_size_limits() {
        let ones = FnFamily { cap: 2, f: |_| Ok(Series::one(2)) };
        assert!(p_delta_minus_one(&ones, 0).is_err());
        assert!(kappa_delta_series(&ones, 0b111_1111).is_err());
    }
}

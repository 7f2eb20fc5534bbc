//! Truncated bivariate power series in `(x, y)` with exact rational coefficients.

use num_traits::{One, Zero};

use super::order::Order;
use crate::error::{Error, Result};
use crate::rational::{to_f64, Q};

/// Largest supported truncation cap (total degree).
pub const MAX_SERIES_CAP: usize = 32;

/// Series `sum_{s + s' <= cap} c_{s,s'} x^s y^{s'}` truncated at total degree `cap`.
///
/// Coefficients are stored densely by total degree: degree `d` occupies
/// `d(d+1)/2 .. (d+1)(d+2)/2`, with the `x` exponent as offset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Series {
    cap: usize,
    coeffs: Vec<Q>,
}

fn index(s: usize, t: usize) -> usize {
    let d = s + t;
    d * (d + 1) / 2 + s
}

/// Combination performed by [`series_combine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineKind {
    /// `f g`.
    Product,
    /// `f + g`.
    Sum,
    /// `1 / (1 + f)`; requires `f(0,0) = 0`.
    ReciprocalOnePlus,
}

impl Series {
    /// The zero series.
    pub fn zero(cap: usize) -> Self {
        assert!(cap <= MAX_SERIES_CAP, "series cap {cap} exceeds {MAX_SERIES_CAP}");
        Self { cap, coeffs: vec![Q::zero(); (cap + 1) * (cap + 2) / 2] }
    }

    /// The constant series `c`.
    pub fn constant(cap: usize, c: Q) -> Self {
        let mut f = Self::zero(cap);
        f.coeffs[0] = c;
        f
    }

    /// The constant series `1`.
    pub fn one(cap: usize) -> Self {
        Self::constant(cap, Q::one())
    }

    /// The monomial `c x^s y^t` (zero if beyond the cap).
    pub fn monomial(cap: usize, s: usize, t: usize, c: Q) -> Self {
        let mut f = Self::zero(cap);
        if s + t <= cap {
            f.coeffs[index(s, t)] = c;
        }
        f
    }

    /// The series `x`.
    pub fn x(cap: usize) -> Self {
        Self::monomial(cap, 1, 0, Q::one())
    }

    /// The series `y`.
    pub fn y(cap: usize) -> Self {
        Self::monomial(cap, 0, 1, Q::one())
    }

    /// Truncation cap.
    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Coefficient of `x^s y^t` (zero beyond the cap).
    pub fn coeff(&self, s: usize, t: usize) -> Q {
        if s + t <= self.cap {
            self.coeffs[index(s, t)].clone()
        } else {
            Q::zero()
        }
    }

    /// Sets the coefficient of `x^s y^t`; ignored beyond the cap.
    pub fn set_coeff(&mut self, s: usize, t: usize, c: Q) {
        if s + t <= self.cap {
            self.coeffs[index(s, t)] = c;
        }
    }

    /// Nonzero terms `(s, t, c)` ordered by total degree then `s`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &Q)> {
        (0..=self.cap)
            .flat_map(|d| (0..=d).map(move |s| (s, d - s)))
            .zip(self.coeffs.iter())
            .filter(|(_, c)| !c.is_zero())
            .map(|((s, t), c)| (s, t, c))
    }

    /// True when every coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Constant term `f(0, 0)`.
    pub fn constant_term(&self) -> &Q {
        &self.coeffs[0]
    }

    fn check_cap(&self, other: &Series) -> Result<()> {
        if self.cap != other.cap {
            return Err(Error::Domain(format!("series caps differ: {} vs {}", self.cap, other.cap)));
        }
        Ok(())
    }

    /// `f + g`.
    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check_cap(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Series { cap: self.cap, coeffs })
    }

    /// `f - g`.
    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.check_cap(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Series { cap: self.cap, coeffs })
    }

    /// `-f`.
    pub fn neg(&self) -> Series {
        Series { cap: self.cap, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// `c f`.
    pub fn scale(&self, c: &Q) -> Series {
        Series { cap: self.cap, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// `f g` truncated at the shared cap.
    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_cap(other)?;
        let mut out = Series::zero(self.cap);
        let a: Vec<_> = self.terms().map(|(s, t, c)| (s, t, c.clone())).collect();
        let b: Vec<_> = other.terms().map(|(s, t, c)| (s, t, c.clone())).collect();
        for (s1, t1, c1) in &a {
            for (s2, t2, c2) in &b {
                if s1 + t1 + s2 + t2 <= self.cap {
                    out.coeffs[index(s1 + s2, t1 + t2)] += c1 * c2;
                }
            }
        }
        Ok(out)
    }

    /// `1 / (1 + f) = sum_d (-f)^d`, truncated; requires `f(0,0) = 0`.
    pub fn reciprocal_one_plus(&self) -> Result<Series> {
        if !self.constant_term().is_zero() {
            return Err(Error::Domain("reciprocal_one_plus requires f(0,0) = 0".into()));
        }
        let minus = self.neg();
        let mut out = Series::one(self.cap);
        let mut power = Series::one(self.cap);
        // (-f)^d has total degree >= d, so d <= cap suffices.
        for _ in 1..=self.cap {
            power = power.mul(&minus)?;
            if power.is_zero() {
                break;
            }
            out = out.add(&power)?;
        }
        Ok(out)
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Series> {
        let c0 = self.constant_term().clone();
        if c0.is_zero() {
            return Err(Error::Domain("series with zero constant term is not invertible".into()));
        }
        let inv_c0 = c0.recip();
        let g = self.scale(&inv_c0).sub(&Series::one(self.cap))?;
        Ok(g.reciprocal_one_plus()?.scale(&inv_c0))
    }

    /// `f^e` for an integer exponent (negative exponents need an invertible series).
    pub fn powi(&self, e: i32) -> Result<Series> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut out = Series::one(self.cap);
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base)?;
        }
        Ok(out)
    }

    /// Order `(min s, min(s + s') - min s)` over the support; infinite for zero.
    pub fn order(&self) -> Order {
        Order::infimum(self.terms().map(|(s, t, _)| (s as u32, t as u32)))
    }

    /// Exact evaluation of the truncated polynomial.
    pub fn evaluate(&self, x: &Q, y: &Q) -> Q {
        self.terms().fold(Q::zero(), |acc, (s, t, c)| {
            acc + c * num_traits::pow(x.clone(), s) * num_traits::pow(y.clone(), t)
        })
    }

    /// Floating-point evaluation of the truncated polynomial.
    pub fn evaluate_f64(&self, x: f64, y: f64) -> f64 {
        self.terms()
            .map(|(s, t, c)| to_f64(c) * x.powi(s as i32) * y.powi(t as i32))
            .sum()
    }
}

/// Applies a [`CombineKind`] to `f` (and `g` for binary kinds).
pub fn series_combine(kind: CombineKind, f: &Series, g: Option<&Series>) -> Result<Series> {
    let need = || g.ok_or_else(|| Error::Domain("binary series operation needs two operands".into()));
    match kind {
        CombineKind::Product => f.mul(need()?),
        CombineKind::Sum => f.add(need()?),
        CombineKind::ReciprocalOnePlus => f.reciprocal_one_plus(),
    }
}

/// Order of a series (free-function form).
pub fn series_order(f: &Series) -> Order {
    f.order()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qfrac};

    #[test]
    fn order_examples() {
        assert_eq!(Series::zero(5).order(), Order::Infinite);
        let f = Series::monomial(6, 2, 1, q(1)).add(&Series::monomial(6, 3, 0, q(1))).unwrap();
        assert_eq!(f.order(), Order::Finite(2, 1));
        let geo = Series::x(6).neg().reciprocal_one_plus().unwrap();
        assert_eq!(geo.order(), Order::Finite(0, 0));
    }

    #[test]
    fn combine_examples() {
        let xy = series_combine(CombineKind::Product, &Series::x(4), Some(&Series::y(4))).unwrap();
        assert_eq!(xy.order(), Order::Finite(1, 1));
        assert_eq!(xy.coeff(1, 1), q(1));
        let zero = series_combine(CombineKind::Sum, &Series::x(4), Some(&Series::x(4).neg())).unwrap();
        assert_eq!(zero.order(), Order::Infinite);
        let geo = series_combine(CombineKind::ReciprocalOnePlus, &Series::x(3).neg(), None).unwrap();
        for s in 0..=3 {
            assert_eq!(geo.coeff(s, 0), q(1));
        }
        assert_eq!(geo.terms().count(), 4);
    }

    #[test]
    fn errors() {
        assert!(Series::one(3).reciprocal_one_plus().is_err());
        assert!(Series::x(3).add(&Series::x(4)).is_err());
        assert!(Series::x(3).inverse().is_err());
        assert!(series_combine(CombineKind::Product, &Series::x(3), None).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let f = Series::constant(6, qfrac(3, 2))
            .add(&Series::x(6).scale(&q(2)))
            .unwrap()
            .add(&Series::monomial(6, 1, 2, qfrac(-1, 5)))
            .unwrap();
        let prod = f.mul(&f.inverse().unwrap()).unwrap();
        assert_eq!(prod, Series::one(6));
        assert_eq!(f.powi(-2).unwrap().mul(&f.powi(2).unwrap()).unwrap(), Series::one(6));
        assert_eq!(f.evaluate(&q(0), &q(0)), qfrac(3, 2));
    }
}

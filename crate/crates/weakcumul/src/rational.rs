//! Exact rational helpers built on `num-rational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Exact rational number used throughout the crate.
pub type Q = BigRational;

/// The rational `a`.
pub fn q(a: i64) -> Q {
    Q::from_integer(BigInt::from(a))
}

/// The rational `a / b`.
///
/// # Panics
/// Panics if `b == 0`.
pub fn qfrac(a: i64, b: i64) -> Q {
    Q::new(BigInt::from(a), BigInt::from(b))
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Falling factorial `n (n-1) ... (n-k+1)`; zero when `k > n`.
pub fn falling_factorial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i))
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    falling_factorial(n, k) / factorial(k as u32)
}

/// Nearest `f64` to a rational (handles huge numerators/denominators).
pub fn to_f64(x: &Q) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let num = x.numer();
    let den = x.denom();
    let shift = num.bits() as i64 - den.bits() as i64;
    // Rescale so that the quotient is representable, then restore the exponent.
    let scaled = if shift > 0 {
        Q::new(num.clone(), den.clone() << (shift as usize))
    } else {
        Q::new(num.clone() << ((-shift) as usize), den.clone())
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// Exact rational conversion of a finite `f64`.
pub fn from_f64(x: f64) -> Option<Q> {
    Q::from_float(x)
}

/// Integer power of a rational.
pub fn pow(x: &Q, e: u32) -> Q {
    num_traits::pow(x.clone(), e as usize)
}

/// Natural logarithm of a positive rational, robust to huge magnitudes.
pub fn ln(x: &Q) -> f64 {
    let num = x.numer();
    let den = x.denom();
    ln_bigint(num) - ln_bigint(den)
}

fn ln_bigint(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits < 1000 {
        return v.to_f64().unwrap_or(f64::NAN).abs().ln();
    }
    let shift = bits - 900;
    let top: BigInt = v >> shift;
    top.to_f64().unwrap_or(f64::NAN).abs().ln() + (shift as f64) * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn falling_and_binomial() {
        assert_eq!(falling_factorial(5, 2), BigInt::from(20));
        assert_eq!(falling_factorial(3, 4), BigInt::zero());
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(factorial(0), BigInt::one());
    }

    #[test]
    fn to_f64_handles_huge_values() {
        let big = Q::new(BigInt::from(3) << 2000usize, BigInt::from(1) << 2000usize);
        assert!((to_f64(&big) - 3.0).abs() < 1e-12);
        let tiny = Q::new(BigInt::one(), BigInt::from(7) << 1000usize);
        let expected = (1.0f64 / 7.0) * 2f64.powi(-1000);
        assert_eq!(to_f64(&tiny), expected);
        assert!((ln(&big) - 3f64.ln()).abs() < 1e-12);
    }
}

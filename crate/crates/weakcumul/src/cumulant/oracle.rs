//! Dense moment tables over subsets and joint cumulants by Möbius inversion.

use num_traits::{One, Zero};

use crate::combinatorics::partition::{for_each_partition_masks, mobius_weight_for_blocks};
use crate::error::{Error, Result};
use crate::rational::Q;

/// Largest number of variables in a joint cumulant.
pub const MAX_CUMULANT_ORDER: usize = 12;

/// Scalars on which Möbius sums can be evaluated (floating point or exact).
pub trait Scalar: Clone + Zero + One + std::ops::Mul<Output = Self> + std::ops::Sub<Output = Self> {
    /// Embeds an integer.
    fn from_i64(v: i64) -> Self;
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for Q {
    fn from_i64(v: i64) -> Self {
        crate::rational::q(v)
    }
}

/// Mixed moments `E[prod_{t in S} Z_t]` for every subset `S` of `{0, ..., l-1}`,
/// indexed by bitmask.  The entry for the empty set is `1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable<T> {
    l: usize,
    values: Vec<T>,
}

impl<T: Scalar> MomentTable<T> {
    /// Tabulates `oracle` on all `2^l` subsets.
    pub fn from_fn(l: usize, mut oracle: impl FnMut(u32) -> T) -> Result<Self> {
        if l > MAX_CUMULANT_ORDER {
            return Err(Error::size("cumulant order", l as u128, MAX_CUMULANT_ORDER as u128));
        }
        let values: Vec<T> = (0..1u32 << l)
            .map(|mask| if mask == 0 { T::one() } else { oracle(mask) })
            .collect();
        Ok(Self { l, values })
    }

    /// Fallible variant of [`MomentTable::from_fn`].
    pub fn try_from_fn(l: usize, mut oracle: impl FnMut(u32) -> Result<T>) -> Result<Self> {
        if l > MAX_CUMULANT_ORDER {
            return Err(Error::size("cumulant order", l as u128, MAX_CUMULANT_ORDER as u128));
        }
        let mut values = Vec::with_capacity(1 << l);
        for mask in 0..1u32 << l {
            values.push(if mask == 0 { T::one() } else { oracle(mask)? });
        }
        Ok(Self { l, values })
    }

    /// Number of variables.
    pub fn order(&self) -> usize {
        self.l
    }

    /// Moment of the subset encoded by `mask`.
    pub fn get(&self, mask: u32) -> &T {
        &self.values[mask as usize]
    }
}

/// Joint cumulant `sum_G m(G) prod_{R in G} E[prod_{t in R} Z_t]` of all `l` variables.
pub fn joint_cumulant<T: Scalar>(table: &MomentTable<T>) -> Result<T> {
    let full = if table.l == 0 { 0 } else { (1u32 << table.l) - 1 };
    joint_cumulant_of_subset(table, full)
}

/// Joint cumulant of the variables in `mask` (a subset of the table's variables).
pub fn joint_cumulant_of_subset<T: Scalar>(table: &MomentTable<T>, mask: u32) -> Result<T> {
    if mask == 0 {
        return Err(Error::Domain("joint cumulant of an empty family".into()));
    }
    let elems: Vec<u32> = (0..table.l as u32).filter(|b| mask & (1 << b) != 0).collect();
    let identity = elems.len() == table.l;
    let mut sum = T::zero();
    for_each_partition_masks(elems.len(), |local| {
        let mut prod = T::one();
        for &b in local {
            let global = if identity {
                b
            } else {
                elems
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| b & (1 << i) != 0)
                    .fold(0u32, |acc, (_, &e)| acc | (1 << e))
            };
            let v = table.get(global);
            if v.is_zero() {
                return;
            }
            prod = prod * v.clone();
        }
        let w = T::from_i64(mobius_weight_for_blocks(local.len()));
        sum = sum.clone() + w * prod;
    })?;
    Ok(sum)
}

/// Convenience: joint cumulant of `l` variables from a moment function.
pub fn joint_cumulant_fn<T: Scalar>(l: usize, oracle: impl FnMut(u32) -> T) -> Result<T> {
    joint_cumulant(&MomentTable::from_fn(l, oracle)?)
}

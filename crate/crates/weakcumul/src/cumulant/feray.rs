//! Recursion controlling cumulants in weighted dependency graphs.

use num_traits::One;

use crate::combinatorics::partition::for_each_partition_masks;
use crate::error::{Error, Result};
use crate::rational::Q;

/// Largest order for which the recursion is evaluated.
pub const MAX_FERAY_ORDER: usize = 8;

/// Sequence `C_1, ..., C_r` with `C_s = D + sum_{G != {[s]}} prod_{R in G} C_{|R|}`
/// and constant `D_s = D`, computed exactly over all set partitions.
pub fn feray_sequence(r: usize, d_inf: &Q) -> Result<Vec<Q>> {
    if r == 0 || r > MAX_FERAY_ORDER {
        return Err(Error::size("recursion order r", r as u128, MAX_FERAY_ORDER as u128));
    }
    let mut c: Vec<Q> = Vec::with_capacity(r);
    for s in 1..=r {
        let mut total = d_inf.clone();
        for_each_partition_masks(s, |blocks| {
            if blocks.len() > 1 {
                let prod = blocks
                    .iter()
                    .fold(Q::one(), |acc, b| acc * &c[b.count_ones() as usize - 1]);
                total += prod;
            }
        })?;
        c.push(total);
    }
    Ok(c)
}

/// `C_r` of [`feray_sequence`].
pub fn feray_recursion(r: usize, d_inf: &Q) -> Result<Q> {
    Ok(feray_sequence(r, d_inf)?.pop().expect("nonempty sequence"))
}

//! Perfect matchings (pairings) of the positions of a multiset.

use crate::error::{Error, Result};

/// Largest multiset size for which pairings are enumerated.
pub const MAX_PAIRING_SIZE: usize = 12;

/// A partition of positions `{0, ..., 2r-1}` into `r` unordered pairs.
///
/// Each pair is stored as `(a, b)` with `a < b`; pairs are ordered by `a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pairing {
    pairs: Vec<(usize, usize)>,
}

impl Pairing {
    /// The pairs of positions.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Enumerates all pairings of positions `0..size` whose pairs satisfy `allowed`.
///
/// Positions stand for the elements of a multiset listed with repetition, so
/// repeated elements are distinguishable copies.  With `allowed` always true
/// this yields `(size-1)!!` pairings.
pub fn enumerate_pairings(
    size: usize,
    allowed: impl Fn(usize, usize) -> bool,
) -> Result<Vec<Pairing>> {
    if size % 2 == 1 {
        return Err(Error::Domain(format!("cannot pair a multiset of odd size {size}")));
    }
    if size > MAX_PAIRING_SIZE {
        return Err(Error::size("pairing multiset size", size as u128, MAX_PAIRING_SIZE as u128));
    }
    let mut out = Vec::new();
    let mut used = vec![false; size];
    let mut current = Vec::with_capacity(size / 2);
    fn rec(
        used: &mut [bool],
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Pairing>,
        allowed: &dyn Fn(usize, usize) -> bool,
    ) {
        let Some(a) = used.iter().position(|u| !u) else {
            out.push(Pairing { pairs: current.clone() });
            return;
        };
        used[a] = true;
        for b in a + 1..used.len() {
            if !used[b] && allowed(a, b) {
                used[b] = true;
                current.push((a, b));
                rec(used, current, out, allowed);
                current.pop();
                used[b] = false;
            }
        }
        used[a] = false;
    }
    rec(&mut used, &mut current, &mut out, &allowed);
    Ok(out)
}

/// Enumerates pairings of `items` in which every pair has equal keys.
pub fn enumerate_pairings_by_key<T, K: PartialEq>(
    items: &[T],
    key: impl Fn(&T) -> K,
) -> Result<Vec<Pairing>> {
    let keys: Vec<K> = items.iter().map(key).collect();
    enumerate_pairings(items.len(), |a, b| keys[a] == keys[b])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial_odd(n: usize) -> usize {
        (1..n).step_by(2).product::<usize>().max(1)
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_pairings(2, |_, _| true).unwrap().len(), 1);
        assert_eq!(enumerate_pairings(4, |_, _| true).unwrap().len(), 3);
        for s in (0..=12).step_by(2) {
            assert_eq!(enumerate_pairings(s, |_, _| true).unwrap().len(), double_factorial_odd(s));
        }
    }

    #[test]
    fn same_column_filter() {
        // cells (row, col): (1,1),(2,1),(1,2),(2,2) in 1-based terms
        let cells = [(0, 0), (1, 0), (0, 1), (1, 1)];
        let p = enumerate_pairings_by_key(&cells, |c| c.1).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].pairs(), &[(0, 1), (2, 3)]);
    }

    #[test]
    fn errors() {
        assert!(matches!(enumerate_pairings(3, |_, _| true), Err(Error::Domain(_))));
        assert!(matches!(enumerate_pairings(14, |_, _| true), Err(Error::SizeLimit { .. })));
    }
}

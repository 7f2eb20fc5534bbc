//! Set partitions of `{0, ..., l-1}` and their Möbius weights.

use crate::error::{Error, Result};

/// Largest ground set for which partitions are enumerated.
pub const MAX_PARTITION_SIZE: usize = 12;

/// A partition of `{0, ..., l-1}` into nonempty blocks.
///
/// Blocks are stored sorted, and ordered by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetPartition {
    ground: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Builds a partition, validating disjointness, coverage and non-emptiness.
    pub fn new(ground: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; ground];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::Domain("empty block in set partition".into()));
            }
            for &v in block {
                if v >= ground || seen[v] {
                    return Err(Error::Domain(format!(
                        "element {v} out of range or repeated in set partition"
                    )));
                }
                seen[v] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Domain("set partition does not cover the ground set".into()));
        }
        Ok(Self::normalized(ground, blocks))
    }

    /// Builds a partition from a block-label vector (`labels[v]` is the block of `v`).
    pub fn from_labels(labels: &[usize]) -> Self {
        let nb = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
        let mut blocks = vec![Vec::new(); nb];
        for (v, &l) in labels.iter().enumerate() {
            blocks[l].push(v);
        }
        blocks.retain(|b| !b.is_empty());
        Self::normalized(labels.len(), blocks)
    }

    fn normalized(ground: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Self { ground, blocks }
    }

    /// Size of the ground set.
    pub fn ground_size(&self) -> usize {
        self.ground
    }

    /// The blocks, each sorted, ordered by smallest element.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks `|G|`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    /// True for the (only) partition of the empty set.
    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Blocks as bitmasks over the ground set.
    pub fn block_masks(&self) -> Vec<u32> {
        self.blocks
            .iter()
            .map(|b| b.iter().fold(0u32, |m, &v| m | (1 << v)))
            .collect()
    }
}

/// Möbius function of the partition lattice, `(-1)^{|G|-1} (|G|-1)!`.
pub fn mobius_weight(g: &SetPartition) -> i64 {
    mobius_weight_for_blocks(g.len())
}

/// `(-1)^{b-1} (b-1)!` for a partition with `b >= 1` blocks.
pub fn mobius_weight_for_blocks(b: usize) -> i64 {
    assert!(b >= 1, "a partition of a nonempty set has at least one block");
    let f: i64 = (1..b as i64).product();
    if b % 2 == 1 {
        f
    } else {
        -f
    }
}

/// Deterministic stream of all partitions of `{0, ..., l-1}`.
///
/// Partitions are generated in lexicographic order of their restricted-growth
/// strings `a` (with `a[0] = 0` and `a[i] <= 1 + max(a[..i])`).
#[derive(Debug, Clone)]
pub struct SetPartitions {
    rgs: Vec<usize>,
    prefix_max: Vec<usize>,
    done: bool,
}

impl Iterator for SetPartitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let current = SetPartition::from_labels(&self.rgs);
        self.advance();
        Some(current)
    }
}

impl SetPartitions {
    fn advance(&mut self) {
        let l = self.rgs.len();
        // Rightmost position that may still be incremented.
        let mut i = l;
        while i > 1 {
            i -= 1;
            if self.rgs[i] <= self.prefix_max[i - 1] {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for j in i + 1..l {
                    self.rgs[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return;
            }
        }
        self.done = true;
    }
}

fn check_size(l: usize) -> Result<()> {
    if l == 0 || l > MAX_PARTITION_SIZE {
        return Err(Error::size("set partition ground size", l as u128, MAX_PARTITION_SIZE as u128));
    }
    Ok(())
}

/// Enumerates every partition of `{0, ..., l-1}` exactly once; `1 <= l <= 12`.
pub fn enumerate_set_partitions(l: usize) -> Result<SetPartitions> {
    check_size(l)?;
    Ok(SetPartitions {
        rgs: vec![0; l],
        prefix_max: vec![0; l],
        done: false,
    })
}

/// Calls `f` with the block bitmasks of every partition of `{0, ..., l-1}`.
///
/// Same set of partitions as [`enumerate_set_partitions`], without allocation
/// per partition; intended for inner loops of Möbius sums.
pub fn for_each_partition_masks(l: usize, mut f: impl FnMut(&[u32])) -> Result<()> {
    check_size(l)?;
    let mut blocks: Vec<u32> = Vec::with_capacity(l);
    fn rec(v: usize, l: usize, blocks: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if v == l {
            f(blocks);
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] |= 1 << v;
            rec(v + 1, l, blocks, f);
            blocks[b] &= !(1 << v);
        }
        blocks.push(1 << v);
        rec(v + 1, l, blocks, f);
        blocks.pop();
    }
    rec(0, l, &mut blocks, &mut f);
    Ok(())
}

/// Calls `f` with every partition (as block bitmasks) of the set encoded by `mask`.
///
/// Works for arbitrary subsets of `{0, ..., 31}` with at most 12 elements.
pub fn for_each_partition_of_mask(mask: u32, mut f: impl FnMut(&[u32])) -> Result<()> {
    let elems: Vec<u32> = (0..32).filter(|b| mask & (1 << b) != 0).collect();
    if elems.is_empty() {
        f(&[]);
        return Ok(());
    }
    check_size(elems.len())?;
    for_each_partition_masks(elems.len(), |local| {
        let mapped: Vec<u32> = local
            .iter()
            .map(|&m| {
                elems
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| m & (1 << i) != 0)
                    .fold(0u32, |acc, (_, &e)| acc | (1 << e))
            })
            .collect();
        f(&mapped);
    })
}

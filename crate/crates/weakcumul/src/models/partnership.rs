//! Partnership matrices: `Γ_uv = 1` iff items `u` and `v` share a latent label.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric 0/1 co-membership matrix over `n` items, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartnershipMatrix {
    n: usize,
    entries: Vec<bool>,
}

impl PartnershipMatrix {
    /// Number of items.
    pub fn len(&self) -> usize {
        self.n
    }

    /// `true` for an empty item set.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Entry `Γ_uv`.
    pub fn get(&self, u: usize, v: usize) -> bool {
        self.entries[u * self.n + v]
    }

    /// Entries as `0.0 / 1.0`, row-major.
    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    /// Squared Frobenius distance, i.e. the number of disagreeing entries.
    pub fn squared_distance(&self, other: &Self) -> Result<usize> {
        if self.n != other.n {
            return Err(Error::Domain(format!("partnership sizes differ ({} vs {})", self.n, other.n)));
        }
        Ok(self.entries.iter().zip(&other.entries).filter(|(a, b)| a != b).count())
    }
}

/// Partnership matrix of a label vector (one label per item).
pub fn partnership(labels: &[usize]) -> PartnershipMatrix {
    let n = labels.len();
    let mut entries = vec![false; n * n];
    for u in 0..n {
        for v in 0..n {
            entries[u * n + v] = labels[u] == labels[v];
        }
    }
    PartnershipMatrix { n, entries }
}

/// Flattens a permutation tuple `latent[m][k]` into labels of items `m * K + k`.
pub fn flatten_tuple(latent: &[Vec<usize>]) -> Vec<usize> {
    latent.iter().flatten().copied().collect()
}

/// Partnership matrix of a permutation tuple, items ordered as `m * K + k`.
pub fn partnership_tuple(latent: &[Vec<usize>]) -> PartnershipMatrix {
    partnership(&flatten_tuple(latent))
}

//! Planted generative models, exact latent moments, partnership matrices and error metrics.
//!
//! # Instance JSON
//!
//! [`PlantedInstance`] serializes as an object tagged by `"model"`
//! (`"mfm"`, `"seriation"` or `"clustering"`) with fields
//! `config` (dimensions and noise parameters), `seed` (or `null`),
//! `latent`, and the flattened arrays:
//! - `mfm`: `latent[m][k]`, `means[k][j]`, `y = {k, m, p, data}` with `data[((m*K)+k)*p + j]`;
//! - `seriation`: `latent[i]` (position of item `i`), `x` and `y` as `n*n` row-major arrays;
//! - `clustering`: `latent[i]` (group of point `i`), `means[k][j]`, `y` as `n*p` row-major.

pub mod clustering;
pub mod latent;
pub mod metrics;
pub mod mfm;
pub mod partnership;
pub mod sampling;
pub mod seriation;

use serde::{Deserialize, Serialize};

pub use clustering::{sample_balanced, sample_balanced_seeded, ClusteringConfig, ClusteringInstance};
pub use latent::{exhaustive_latent_probability, latent_moment, Constraint, LatentModel};
pub use metrics::{err_part, err_part_exact, err_perm, err_perm_exact, max_agreement};
pub use mfm::{sample_mfm, sample_mfm_seeded, MfmConfig, MfmInstance, MfmObservations};
pub use partnership::{flatten_tuple, partnership, partnership_tuple, PartnershipMatrix};
pub use sampling::{derive_seed, random_permutation, rng_from_seed, standard_normal, ModelRng};
pub use seriation::{band_matrix, phi, phi_exact, sample_seriation, sample_seriation_seeded, SeriationConfig, SeriationInstance};

use crate::error::{Error, Result};

/// One instance of any of the three models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum PlantedInstance {
    Mfm(MfmInstance),
    Seriation(SeriationInstance),
    Clustering(ClusteringInstance),
}

impl PlantedInstance {
    /// Seed the instance was generated from, when recorded.
    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::Mfm(i) => i.seed,
            Self::Seriation(i) => i.seed,
            Self::Clustering(i) => i.seed,
        }
    }

    /// Serializes to the JSON schema described in the module docs.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instances always serialize")
    }

    /// Parses the JSON schema described in the module docs.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid instance JSON: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let all = [
            PlantedInstance::Mfm(sample_mfm_seeded(&MfmConfig { k: 3, m: 2, p: 2, sigma: 1.0, delta_bar_sq: 2.0 }, 5).unwrap()),
            PlantedInstance::Seriation(
                sample_seriation_seeded(&SeriationConfig { n: 5, rho: 1, lambda: 1.0, sigma: 1.0 }, 6).unwrap(),
            ),
            PlantedInstance::Clustering(
                sample_balanced_seeded(&ClusteringConfig { n: 6, k: 2, p: 3, sigma: 1.0, delta_bar_sq: 1.0 }, 7).unwrap(),
            ),
        ];
        for inst in all {
            let text = inst.to_json();
            assert!(text.contains("\"model\""));
            assert_eq!(PlantedInstance::from_json(&text).unwrap(), inst);
        }
        assert!(PlantedInstance::from_json("{}").is_err());
    }
}

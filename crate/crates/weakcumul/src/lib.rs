//! Cumulants of weakly dependent latent variables and their use in low-degree
//! MMSE lower bounds for planted permutation models.
//!
//! Modules:
//! - [`combinatorics`]: set partitions, pairings, multi-indices, dependency graphs.
//! - [`cumulant`]: joint cumulants from moment tables, quasi-factorized moments, bounds.
//! - [`series`]: truncated bivariate series, their order, and polynomial graphs.
//! - [`models`]: feature matching, seriation and balanced clustering generators,
//!   exact latent moments, partnership matrices and error metrics.
//! - [`lowdeg`]: exact `κ_{x,α}`, per-model bounds, and low-degree MMSE lower bounds.
//! - [`estimators`]: seriation, matching and clustering estimators.
//! - [`generators`]: seeded random instances for the verification suites.
//!
//! All indices are 0-based.  Items `0` and `1` (for feature matching: point 0
//! of datasets 0 and 1) are the anchors carrying the target indicator `x`.

pub mod assignment;
pub mod combinatorics;
pub mod cumulant;
pub mod error;
pub mod estimators;
pub mod generators;
pub mod lowdeg;
pub mod models;
pub mod rational;
pub mod series;

pub use error::{Error, Result};
pub use rational::Q;

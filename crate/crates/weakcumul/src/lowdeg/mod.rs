//! Low-degree MMSE machinery: exact `κ_{x,α}`, nullity rules, closed-form cumulant
//! bounds, orbit-reduced enumeration of `α`, the low-degree lower bound and the
//! closed-form theorem bounds, plus a Monte Carlo regression harness.
//!
//! The noise level is normalized to `1` throughout; see [`ModelParams`].

pub mod empirical;
pub mod kappa;
pub mod orbits;
pub mod params;
pub mod sw;

pub use empirical::{draw_observation, empirical_lowdeg_mse, monomials, EmpiricalReport};
pub use kappa::{kappa_bound, kappa_exact, kappa_exact_cached, kappa_report, nullity_filter, KappaReport, MomentCache};
pub use orbits::{enumerate_naive, enumerate_orbits, Orbit};
pub use params::{ModelKind, ModelParams, TargetSpec};
pub use sw::{sw_bound, sw_bound_naive, sw_bound_with, target_variance, theorem_bound, SwReport};

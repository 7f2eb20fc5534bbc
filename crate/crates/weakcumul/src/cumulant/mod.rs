//! Joint cumulants, quasi-factorized moments, and cumulant bounds.

pub mod feray;
pub mod moment_spec;
pub mod oracle;

pub use feray::{feray_recursion, feray_sequence};
pub use moment_spec::MomentSpec;
pub use oracle::{joint_cumulant, joint_cumulant_fn, joint_cumulant_of_subset, MomentTable, Scalar};

//! Model parameters (noise normalized to `σ = 1`) and the estimated scalar `x`.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::combinatorics::GridKind;
use crate::error::{Error, Result};
use crate::models::{Constraint, LatentModel};
use crate::rational::{from_f64, to_f64, Q};

/// Which planted model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Mfm,
    Seriation,
    Clustering,
}

impl ModelKind {
    /// Lower-case name used in reports and configuration files.
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Mfm => "mfm",
            ModelKind::Seriation => "seriation",
            ModelKind::Clustering => "clustering",
        }
    }
}

/// Parameters of a planted model with unit noise level.
///
/// Public parameters with a noise level `σ` are rescaled on entry: the signal
/// strength below is always the signal-to-noise quantity (`λ²/σ²`, `λ/σ`).
#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    /// Feature matching: `K` points per dataset, `M` datasets, dimension `p`,
    /// mean variance `λ²` per coordinate.
    Mfm { k: usize, m: usize, p: usize, lambda_sq: Q },
    /// Seriation: `n` items, band half-width `ρ`, signal level `λ`.
    Seriation { n: usize, rho: usize, lambda: Q },
    /// Balanced clustering: `n` points, `K` groups, dimension `p`, mean variance `λ²`.
    Clustering { n: usize, k: usize, p: usize, lambda_sq: Q },
}

fn exact(v: f64, what: &str) -> Result<Q> {
    from_f64(v).filter(|q| !q.is_negative()).ok_or_else(|| Error::Config(format!("{what} must be finite and nonnegative")))
}

impl ModelParams {
    /// Feature matching from the separation `Δ̄²` and noise `σ` (`λ²/σ² = Δ̄²/p`).
    pub fn mfm(k: usize, m: usize, p: usize, delta_bar_sq: f64) -> Result<Self> {
        let params = ModelParams::Mfm { k, m, p, lambda_sq: exact(delta_bar_sq, "delta_bar_sq")? / Q::from_integer(p.max(1).into()) };
        params.validate()?;
        Ok(params)
    }

    /// Seriation from the signal level `λ` and noise `σ`.
    pub fn seriation(n: usize, rho: usize, lambda: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Config("sigma must be positive".into()));
        }
        let params = ModelParams::Seriation { n, rho, lambda: exact(lambda / sigma, "lambda")? };
        params.validate()?;
        Ok(params)
    }

    /// Balanced clustering from the separation `Δ̄²` (`λ²/σ² = Δ̄²/p`).
    pub fn clustering(n: usize, k: usize, p: usize, delta_bar_sq: f64) -> Result<Self> {
        let params =
            ModelParams::Clustering { n, k, p, lambda_sq: exact(delta_bar_sq, "delta_bar_sq")? / Q::from_integer(p.max(1).into()) };
        params.validate()?;
        Ok(params)
    }

    /// Checks dimensions and signal strength.
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            ModelParams::Mfm { k, m, p, lambda_sq } => *k >= 2 && *m >= 2 && *p >= 1 && !lambda_sq.is_negative(),
            ModelParams::Seriation { n, rho, lambda } => *n >= 2 && *rho >= 1 && *rho < *n && !lambda.is_negative(),
            ModelParams::Clustering { n, k, p, lambda_sq } => {
                *k >= 2 && *p >= 1 && *n >= *k && n % k == 0 && !lambda_sq.is_negative()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid model parameters {self:?}")))
        }
    }

    /// Model kind.
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Mfm { .. } => ModelKind::Mfm,
            ModelParams::Seriation { .. } => ModelKind::Seriation,
            ModelParams::Clustering { .. } => ModelKind::Clustering,
        }
    }

    /// Observation grid.
    pub fn grid(&self) -> GridKind {
        match *self {
            ModelParams::Mfm { k, m, p, .. } => GridKind::Tensor { k, m, p },
            ModelParams::Seriation { n, .. } => GridKind::Square { n },
            ModelParams::Clustering { n, p, .. } => GridKind::Matrix { n, p },
        }
    }

    /// Latent prior.
    pub fn latent(&self) -> LatentModel {
        match *self {
            ModelParams::Mfm { k, m, .. } => LatentModel::MultiPermutation { k, m },
            ModelParams::Seriation { n, .. } => LatentModel::Permutation { n },
            ModelParams::Clustering { n, k, .. } => LatentModel::Balanced { n, k },
        }
    }

    /// The estimated indicator `x`.
    pub fn target(&self) -> TargetSpec {
        let constraint = match *self {
            ModelParams::Mfm { k, .. } => Constraint::Equal(0, k),
            ModelParams::Seriation { rho, .. } => Constraint::Band { a: 0, b: 1, rho },
            ModelParams::Clustering { .. } => Constraint::Equal(0, 1),
        };
        TargetSpec { kind: self.kind(), constraint }
    }

    /// `λ^d` exactly; `None` when it is irrational (odd `d` with only `λ²` known).
    pub fn lambda_pow(&self, d: usize) -> Option<Q> {
        match self {
            ModelParams::Seriation { lambda, .. } => Some(crate::rational::pow(lambda, d as u32)),
            ModelParams::Mfm { lambda_sq, .. } | ModelParams::Clustering { lambda_sq, .. } => {
                (d % 2 == 0).then(|| crate::rational::pow(lambda_sq, (d / 2) as u32))
            }
        }
    }

    /// `λ²` exactly.
    pub fn lambda_sq(&self) -> Q {
        match self {
            ModelParams::Seriation { lambda, .. } => lambda * lambda,
            ModelParams::Mfm { lambda_sq, .. } | ModelParams::Clustering { lambda_sq, .. } => lambda_sq.clone(),
        }
    }

    /// Named numeric parameters for reports.
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        let mut put = |k: &str, v: f64| {
            out.insert(k.to_string(), v);
        };
        match self {
            ModelParams::Mfm { k, m, p, lambda_sq } => {
                put("K", *k as f64);
                put("M", *m as f64);
                put("p", *p as f64);
                put("lambda_sq", to_f64(lambda_sq));
            }
            ModelParams::Seriation { n, rho, lambda } => {
                put("n", *n as f64);
                put("rho", *rho as f64);
                put("lambda", to_f64(lambda));
            }
            ModelParams::Clustering { n, k, p, lambda_sq } => {
                put("n", *n as f64);
                put("K", *k as f64);
                put("p", *p as f64);
                put("lambda_sq", to_f64(lambda_sq));
            }
        }
        out
    }

    /// `true` when there is no signal.
    pub fn is_null_signal(&self) -> bool {
        self.lambda_sq().is_zero()
    }
}

/// The `{0,1}`-valued, latent-measurable scalar being estimated.
///
/// Feature matching: `1{π_0(0) = π_1(0)}`; seriation: `1{|π(0) - π(1)| <= ρ}`;
/// clustering: `1{π(0) = π(1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TargetSpec {
    pub kind: ModelKind,
    /// Event whose indicator is `x`.
    pub constraint: Constraint,
}

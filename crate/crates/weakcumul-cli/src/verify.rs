//! Verification suites: randomized or exhaustive checks of the moment
//! formulas, the cumulant bounds and the order calculus.
//!
//! Every suite produces a [`SuiteReport`]; the first violation found is
//! serialized as `counterexample`.  `bound_scale` multiplies the checked
//! bounds, so a scale of `0` is a negative control that must fail.

use num_traits::Signed;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use weakcumul::combinatorics::MultiIndex;
use weakcumul::generators::{random_constraints, random_series, random_spec, SpecBranch};
use weakcumul::lowdeg::{enumerate_orbits, kappa_bound, kappa_exact_cached, nullity_filter, ModelParams, MomentCache};
use weakcumul::models::{exhaustive_latent_probability, latent_moment, rng_from_seed, LatentModel, ModelRng};
use weakcumul::rational::{qfrac, to_f64};
use weakcumul::series::{
    build_lstar, p_delta_minus_one, poly_graph_order, series_order, FactorialFamily, Order, Series, SpecFamily,
};
use weakcumul::Error;

use crate::error::{CliError, CliResult};

/// Names accepted by `verify`.
pub const SUITES: [&str; 4] = ["core-bound", "order-lemma", "kappa-bound", "moment-oracle"];

/// Tally of one group of checks.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GroupReport {
    pub name: String,
    pub checked: usize,
    /// Cases outside the hypotheses of the checked statement.
    pub skipped: usize,
    pub violations: usize,
    /// Largest `|value| / bound` seen (bound suites only).
    pub max_ratio: Option<f64>,
}

impl GroupReport {
    fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    fn ratio(&mut self, value: f64, bound: f64) {
        if bound > 0.0 {
            let r = value / bound;
            self.max_ratio = Some(self.max_ratio.map_or(r, |m: f64| m.max(r)));
        }
    }
}

/// Outcome of a suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub seed: u64,
    pub bound_scale: f64,
    pub groups: Vec<GroupReport>,
    /// First violating instance, if any.
    pub counterexample: Option<Value>,
}

impl SuiteReport {
    fn finish(suite: &str, seed: u64, bound_scale: f64, groups: Vec<GroupReport>, counterexample: Option<Value>) -> Self {
        let passed = groups.iter().all(|g| g.violations == 0);
        Self { suite: suite.to_string(), passed, seed, bound_scale, groups, counterexample }
    }

    /// Total number of checks performed.
    pub fn checked(&self) -> usize {
        self.groups.iter().map(|g| g.checked).sum()
    }

    /// Pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

/// Settings shared by the suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Random cases per group (suite-specific default when `None`).
    pub cases: Option<usize>,
    /// Maximal degree for `kappa-bound` (default 4).
    pub degree: Option<usize>,
    pub bound_scale: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: 0, cases: None, degree: None, bound_scale: 1.0 }
    }
}

/// Runs the named suite.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> CliResult<SuiteReport> {
    match name {
        "core-bound" => core_bound_suite(opts),
        "order-lemma" => order_lemma_suite(opts),
        "kappa-bound" => kappa_bound_suite(opts),
        "moment-oracle" => moment_oracle_suite(opts),
        other => Err(CliError::Config(format!("unknown suite {other:?} (available: {SUITES:?})"))),
    }
}

fn record(slot: &mut Option<Value>, value: impl FnOnce() -> Value) {
    if slot.is_none() {
        *slot = Some(value());
    }
}

/// `|κ| <= bound_scale · core_bound` on random quasi-factorized specs
/// (`l <= 4`, `L <= 8`), half without and half with `B` sets.
pub fn core_bound_suite(opts: &SuiteOptions) -> CliResult<SuiteReport> {
    let cases = opts.cases.unwrap_or(200);
    let mut rng = rng_from_seed(opts.seed);
    let mut groups = [GroupReport::new("r = 0"), GroupReport::new("r >= 1")];
    let mut counterexample = None;
    for i in 0..cases {
        let branch = if i % 2 == 0 { SpecBranch::WithoutB } else { SpecBranch::WithB };
        let group = &mut groups[i % 2];
        let spec = random_spec(&mut rng, 4, 8, branch)?;
        let exact = spec.exact_cumulant()?;
        let bound = match spec.core_bound() {
            Ok(b) => b * opts.bound_scale,
            Err(Error::Precondition(_)) => {
                group.skipped += 1;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let value = to_f64(&exact.abs());
        group.checked += 1;
        group.ratio(value, bound);
        if value > bound * (1.0 + 1e-12) {
            group.violations += 1;
            record(&mut counterexample, || json!({ "spec": spec, "cumulant": exact.to_string(), "bound": bound }));
        }
    }
    Ok(SuiteReport::finish("core-bound", opts.seed, opts.bound_scale, groups.to_vec(), counterexample))
}

/// Order calculus: elementary order rules on random series, alternating
/// products of moment series against their dependency graphs, the component
/// count of the dependency graph, and falling-factorial families.
pub fn order_lemma_suite(opts: &SuiteOptions) -> CliResult<SuiteReport> {
    let mut rng = rng_from_seed(opts.seed);
    let mut counterexample = None;

    let mut basic = GroupReport::new("basic order rules");
    let cap = 8;
    for _ in 0..500 {
        let f = random_series(&mut rng, cap, cap / 2, true);
        let g = random_series(&mut rng, cap, cap / 2, true);
        let h = random_series(&mut rng, cap, cap / 2, false);
        let (of, og) = (series_order(&f), series_order(&g));
        let product = series_order(&f.mul(&g)?).geq(of.add(og));
        let sum = series_order(&f.add(&g)?).geq(of.inf(og));
        let reciprocal = series_order(&h.reciprocal_one_plus()?.sub(&Series::one(cap))?) == series_order(&h);
        basic.checked += 1;
        if !(product && sum && reciprocal) {
            basic.violations += 1;
            record(&mut counterexample, || {
                json!({ "f": format!("{f:?}"), "g": format!("{g:?}"), "h": format!("{h:?}"),
                        "product": product, "sum": sum, "reciprocal": reciprocal })
            });
        }
    }

    let mut products = GroupReport::new("alternating products vs dependency graph");
    let mut graphs = GroupReport::new("dependency graph components");
    for i in 0..opts.cases.unwrap_or(100) {
        let branch = if i % 2 == 0 { SpecBranch::WithoutB } else { SpecBranch::WithB };
        let spec = random_spec(&mut rng, 4, 8, branch)?;
        let family = SpecFamily::new(&spec, 10)?;
        let lstar = build_lstar(&spec);
        for delta in 1u32..1 << spec.ell() {
            if delta.count_ones() < 2 {
                continue;
            }
            let ord = series_order(&p_delta_minus_one(&family, delta)?);
            let graph = poly_graph_order(&lstar.induced(delta));
            products.checked += 1;
            if !ord.geq(graph) {
                products.violations += 1;
                record(&mut counterexample, || {
                    json!({ "spec": spec, "delta": delta, "series_order": ord, "graph_order": graph })
                });
            }
        }
        graphs.checked += 1;
        if let Order::Finite(d, d2) = poly_graph_order(&lstar) {
            let l = spec.ell() as u32;
            if d + 1 < spec.b_graph_components() as u32 || d + d2 + 1 < l {
                graphs.violations += 1;
                record(&mut counterexample, || json!({ "spec": spec, "graph_order": [d, d2] }));
            }
        }
    }

    // Exhaustive over weight vectors in {0,...,3}^4 and subsets of size <= 4.
    let mut factorial = GroupReport::new("falling-factorial families");
    for code in 0..256u32 {
        let weights: Vec<u32> = (0..4).map(|i| (code >> (2 * i)) & 3).collect();
        for reciprocal in [false, true] {
            for in_x in [true, false] {
                let fam = FactorialFamily { weights: weights.clone(), reciprocal, in_x, cap: 8 };
                for delta in 1u32..16 {
                    let need = delta.count_ones() - 1;
                    let ord = series_order(&p_delta_minus_one(&fam, delta)?);
                    let floor = if in_x { Order::Finite(need, 0) } else { Order::Finite(0, need) };
                    factorial.checked += 1;
                    if !ord.geq(floor) {
                        factorial.violations += 1;
                        record(&mut counterexample, || {
                            json!({ "weights": weights, "delta": delta, "reciprocal": reciprocal, "in_x": in_x, "order": ord })
                        });
                    }
                }
            }
        }
    }
    let groups = vec![basic, products, graphs, factorial];
    Ok(SuiteReport::finish("order-lemma", opts.seed, opts.bound_scale, groups, counterexample))
}

/// Models of the `kappa-bound` suite.
pub fn kappa_bound_models() -> Vec<(String, ModelParams)> {
    vec![
        ("clustering n=96 K=3 p=2".into(), ModelParams::Clustering { n: 96, k: 3, p: 2, lambda_sq: qfrac(1, 4) }),
        ("mfm K=72 M=2 p=2".into(), ModelParams::Mfm { k: 72, m: 2, p: 2, lambda_sq: qfrac(1, 4) }),
        ("seriation n=72 rho=2".into(), ModelParams::Seriation { n: 72, rho: 2, lambda: qfrac(1, 2) }),
    ]
}

struct KappaOutcome {
    filtered: bool,
    bound: Option<f64>,
    exact: f64,
    exact_text: String,
}

fn kappa_case(params: &ModelParams, alpha: &MultiIndex, cache: &MomentCache, scale: f64) -> CliResult<KappaOutcome> {
    if nullity_filter(params, alpha) {
        return Ok(KappaOutcome { filtered: true, bound: None, exact: 0.0, exact_text: String::new() });
    }
    let bound = match kappa_bound(params, alpha) {
        Ok(b) => Some(b * scale),
        Err(Error::Precondition(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let (exact, exact_text) = if bound.is_some() {
        let k = kappa_exact_cached(params, alpha, cache)?;
        (to_f64(&k.abs()), k.to_string())
    } else {
        (0.0, String::new())
    };
    Ok(KappaOutcome { filtered: false, bound, exact, exact_text })
}

/// `|κ_{x,α}| <= bound_scale · kappa_bound` for one representative of every
/// symmetry class of multi-indices with `1 <= |α| <= D` (default `D = 4`).
///
/// `κ` and the bound are invariant under relabelling non-anchor items,
/// features and datasets, so classes cover every multi-index.  Filtered
/// multi-indices (`κ = 0`) and those outside the bound's hypotheses are
/// counted as skipped.
pub fn kappa_bound_suite(opts: &SuiteOptions) -> CliResult<SuiteReport> {
    let max_degree = opts.degree.unwrap_or(4);
    let mut groups = Vec::new();
    let mut counterexample = None;
    for (name, params) in kappa_bound_models() {
        let cache = MomentCache::new(params.latent());
        let mut group = GroupReport::new(name);
        for d in 1..=max_degree {
            let orbits = enumerate_orbits(params.grid(), d)?;
            let outcomes: Vec<CliResult<KappaOutcome>> =
                orbits.par_iter().map(|o| kappa_case(&params, &o.alpha, &cache, opts.bound_scale)).collect();
            for (orbit, outcome) in orbits.iter().zip(outcomes) {
                let outcome = outcome?;
                match outcome.bound {
                    _ if outcome.filtered => group.skipped += 1,
                    None => group.skipped += 1,
                    Some(bound) => {
                        group.checked += 1;
                        group.ratio(outcome.exact, bound);
                        if outcome.exact > bound * (1.0 + 1e-12) {
                            group.violations += 1;
                            record(&mut counterexample, || {
                                json!({ "params": params.to_map(), "model": params.kind().name(),
                                        "alpha": orbit.alpha, "kappa": outcome.exact_text, "bound": bound })
                            });
                        }
                    }
                }
            }
        }
        groups.push(group);
    }
    Ok(SuiteReport::finish("kappa-bound", opts.seed, opts.bound_scale, groups, counterexample))
}

/// Latent models of the `moment-oracle` suite (all with at most 7 items).
pub fn moment_oracle_models() -> Vec<LatentModel> {
    vec![
        LatentModel::Permutation { n: 7 },
        LatentModel::MultiPermutation { k: 3, m: 2 },
        LatentModel::MultiPermutation { k: 2, m: 3 },
        LatentModel::Balanced { n: 6, k: 3 },
        LatentModel::Balanced { n: 6, k: 2 },
    ]
}

/// Closed-form latent moments against exhaustive enumeration, exactly.
pub fn moment_oracle_suite(opts: &SuiteOptions) -> CliResult<SuiteReport> {
    let cases = opts.cases.unwrap_or(200);
    let mut counterexample = None;
    let mut groups = Vec::new();
    for (index, model) in moment_oracle_models().into_iter().enumerate() {
        let mut rng: ModelRng = rng_from_seed(weakcumul::models::derive_seed(opts.seed, index as u64));
        let mut group = GroupReport::new(format!("{model:?}"));
        for _ in 0..cases {
            let max = rng.random_range(1..=4);
            let constraints = random_constraints(&mut rng, &model, max);
            let closed = latent_moment(&model, &constraints)?;
            let enumerated = exhaustive_latent_probability(&model, &constraints)?;
            group.checked += 1;
            if closed != enumerated {
                group.violations += 1;
                record(&mut counterexample, || {
                    json!({ "model": model, "constraints": constraints,
                            "closed_form": closed.to_string(), "enumeration": enumerated.to_string() })
                });
            }
        }
        groups.push(group);
    }
    Ok(SuiteReport::finish("moment-oracle", opts.seed, opts.bound_scale, groups, counterexample))
}

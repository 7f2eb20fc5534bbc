//! Exact probabilities of constraint events under the latent priors.
//!
//! Three priors are supported:
//! - [`LatentModel::Permutation`]: a uniform permutation of `[n]`; item `i`
//!   receives label (position) `π(i)`.
//! - [`LatentModel::MultiPermutation`]: `M` independent uniform permutations of
//!   `[K]`; item `m * K + k` (point `k` of dataset `m`) receives label `π_m(k)`.
//! - [`LatentModel::Balanced`]: a uniform labelling of `[n]` by `[K]` with
//!   every label used exactly `n / K` times.
//!
//! Equality and fixed-label constraints are closed under transitivity into
//! monochromatic blocks and summed over block colourings with closed-form
//! falling-factorial probabilities.  Band constraints (only for the
//! permutation prior) are counted exactly by placing each connected component
//! of the constraint graph as a rigid shape and counting disjoint translations.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::combinatorics::partition::{enumerate_set_partitions, SetPartition};
use crate::error::{Error, Result};
use crate::rational::{falling_factorial, Q};

/// Largest number of distinct constrained items.
pub const MAX_CONSTRAINED_ITEMS: usize = 12;

/// Latent prior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatentModel {
    /// Uniform permutation of `[n]`.
    Permutation { n: usize },
    /// `m` independent uniform permutations of `[k]`.
    MultiPermutation { k: usize, m: usize },
    /// Uniform balanced labelling of `[n]` with `k` labels.
    Balanced { n: usize, k: usize },
}

/// An event on the latent labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Constraint {
    /// Items share their label.
    Equal(usize, usize),
    /// Item has the given label.
    Fixed(usize, usize),
    /// `|π(a) - π(b)| <= rho` (permutation prior only).
    Band { a: usize, b: usize, rho: usize },
}

impl LatentModel {
    /// Number of items.
    pub fn item_count(&self) -> usize {
        match *self {
            LatentModel::Permutation { n } | LatentModel::Balanced { n, .. } => n,
            LatentModel::MultiPermutation { k, m } => k * m,
        }
    }

    /// Number of labels.
    pub fn label_count(&self) -> usize {
        match *self {
            LatentModel::Permutation { n } => n,
            LatentModel::MultiPermutation { k, .. } | LatentModel::Balanced { k, .. } => k,
        }
    }

    /// Item index of point `k` in dataset `m` for the multi-permutation prior.
    pub fn mfm_item(k_count: usize, k: usize, m: usize) -> usize {
        m * k_count + k
    }

    fn validate(&self) -> Result<()> {
        match *self {
            LatentModel::Permutation { n } if n == 0 => Err(Error::Domain("n must be positive".into())),
            LatentModel::MultiPermutation { k, m } if k == 0 || m == 0 => {
                Err(Error::Domain("K and M must be positive".into()))
            }
            LatentModel::Balanced { n, k } if k == 0 || n == 0 || n % k != 0 => {
                Err(Error::Domain(format!("balanced prior needs K | n (n = {n}, K = {k})")))
            }
            _ => Ok(()),
        }
    }
}

fn constraint_items(c: &Constraint) -> Vec<usize> {
    match *c {
        Constraint::Equal(a, b) => vec![a, b],
        Constraint::Fixed(a, _) => vec![a],
        Constraint::Band { a, b, .. } => vec![a, b],
    }
}

fn validate(model: &LatentModel, constraints: &[Constraint]) -> Result<BTreeSet<usize>> {
    model.validate()?;
    let items: BTreeSet<usize> = constraints.iter().flat_map(constraint_items).collect();
    if let Some(&bad) = items.iter().find(|&&i| i >= model.item_count()) {
        return Err(Error::Domain(format!("item {bad} out of range")));
    }
    if items.len() > MAX_CONSTRAINED_ITEMS {
        return Err(Error::size("constrained items", items.len() as u128, MAX_CONSTRAINED_ITEMS as u128));
    }
    for c in constraints {
        match *c {
            Constraint::Fixed(_, v) if v >= model.label_count() => {
                return Err(Error::Domain(format!("label {v} out of range")));
            }
            Constraint::Band { .. } if !matches!(model, LatentModel::Permutation { .. }) => {
                return Err(Error::Domain("band constraints need the permutation prior".into()));
            }
            _ => {}
        }
    }
    Ok(items)
}

/// Exact probability that the latent labels satisfy every constraint.
pub fn latent_moment(model: &LatentModel, constraints: &[Constraint]) -> Result<Q> {
    let items = validate(model, constraints)?;
    if constraints.iter().any(|c| matches!(c, Constraint::Band { .. })) {
        if let LatentModel::Permutation { n } = *model {
            return band_probability(n, &items, constraints);
        }
    }
    colouring_probability(model, &items, constraints)
}

/// Probability of equality/fixed constraints via monochromatic blocks.
fn colouring_probability(model: &LatentModel, items: &BTreeSet<usize>, constraints: &[Constraint]) -> Result<Q> {
    if items.is_empty() {
        return Ok(Q::one());
    }
    let item_list: Vec<usize> = items.iter().copied().collect();
    let pos = |i: usize| item_list.binary_search(&i).expect("known item");
    let mut uf = UnionFind::<usize>::new(item_list.len());
    for c in constraints {
        if let Constraint::Equal(a, b) = *c {
            uf.union(pos(a), pos(b));
        }
    }
    let labels = uf.into_labeling();
    let mut block_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (idx, root) in labels.iter().enumerate() {
        let b = *block_of_root.entry(*root).or_insert_with(|| {
            blocks.push(Vec::new());
            blocks.len() - 1
        });
        blocks[b].push(item_list[idx]);
    }
    let mut block_fixed: Vec<Option<usize>> = vec![None; blocks.len()];
    for c in constraints {
        if let Constraint::Fixed(a, v) = *c {
            let b = block_of_root[&labels[pos(a)]];
            match block_fixed[b] {
                Some(w) if w != v => return Ok(Q::zero()),
                _ => block_fixed[b] = Some(v),
            }
        }
    }
    let k_labels = model.label_count();
    let dataset_of = |item: usize| -> usize {
        match *model {
            LatentModel::MultiPermutation { k, .. } => item / k,
            LatentModel::Permutation { .. } => 0,
            LatentModel::Balanced { .. } => item,
        }
    };
    let injective_within_dataset = !matches!(model, LatentModel::Balanced { .. });
    let mut total = Q::zero();
    for grouping in enumerate_set_partitions(blocks.len())? {
        if let Some(weight) = grouping_weight(model, &blocks, &block_fixed, &grouping, k_labels, injective_within_dataset, &dataset_of) {
            total += weight;
        }
    }
    Ok(total)
}

/// Probability mass of colourings in which blocks of one group share a label
/// and distinct groups get distinct labels; `None` when impossible.
fn grouping_weight(
    model: &LatentModel,
    blocks: &[Vec<usize>],
    block_fixed: &[Option<usize>],
    grouping: &SetPartition,
    k_labels: usize,
    injective_within_dataset: bool,
    dataset_of: &dyn Fn(usize) -> usize,
) -> Option<Q> {
    let mut fixed_labels = BTreeSet::new();
    let mut free_groups = 0u64;
    let mut group_sizes = Vec::with_capacity(grouping.len());
    for group in grouping.blocks() {
        let mut fixed = None;
        let mut size = 0usize;
        let mut datasets = BTreeSet::new();
        for &b in group {
            if let Some(v) = block_fixed[b] {
                if fixed.is_some_and(|w| w != v) {
                    return None;
                }
                fixed = Some(v);
            }
            for &item in &blocks[b] {
                size += 1;
                if injective_within_dataset && !datasets.insert(dataset_of(item)) {
                    return None;
                }
            }
        }
        match fixed {
            Some(v) => {
                if !fixed_labels.insert(v) {
                    return None;
                }
            }
            None => free_groups += 1,
        }
        group_sizes.push(size);
    }
    let colourings = falling_factorial((k_labels - fixed_labels.len()) as u64, free_groups);
    if colourings.is_zero() {
        return None;
    }
    let n_items: usize = group_sizes.iter().sum();
    let per_colouring = match *model {
        LatentModel::Balanced { n, k } => {
            let cap = (n / k) as u64;
            let num = group_sizes
                .iter()
                .fold(BigInt::one(), |acc, &s| acc * falling_factorial(cap, s as u64));
            Q::new(num, falling_factorial(n as u64, n_items as u64))
        }
        LatentModel::Permutation { n } => Q::new(BigInt::one(), falling_factorial(n as u64, n_items as u64)),
        LatentModel::MultiPermutation { k, .. } => {
            let mut per_dataset: BTreeMap<usize, u64> = BTreeMap::new();
            for group in grouping.blocks() {
                for &b in group {
                    for &item in &blocks[b] {
                        *per_dataset.entry(dataset_of(item)).or_insert(0) += 1;
                    }
                }
            }
            let den = per_dataset
                .values()
                .fold(BigInt::one(), |acc, &c| acc * falling_factorial(k as u64, c));
            Q::new(BigInt::one(), den)
        }
    };
    Some(Q::from_integer(colourings) * per_colouring)
}

/// A connected component of band constraints placed as a rigid shape.
struct Component {
    items: Vec<usize>,
    /// All admissible offset vectors (aligned with `items`), normalized to min 0.
    shapes: Vec<Vec<usize>>,
}

fn component_shapes(items: &[usize], edges: &[(usize, usize, usize)], n: usize) -> Vec<Vec<usize>> {
    // Depth-first assignment of offsets relative to items[0], expanding along edges.
    let idx = |v: usize| items.iter().position(|&x| x == v).expect("component item");
    let local: Vec<(usize, usize, usize)> = edges.iter().map(|&(a, b, r)| (idx(a), idx(b), r)).collect();
    let mut offsets: Vec<Option<i64>> = vec![None; items.len()];
    offsets[0] = Some(0);
    let mut shapes = BTreeSet::new();
    fn rec(
        offsets: &mut Vec<Option<i64>>,
        local: &[(usize, usize, usize)],
        n: usize,
        shapes: &mut BTreeSet<Vec<usize>>,
    ) {
        // Next unassigned vertex adjacent to an assigned one.
        let next = local.iter().find_map(|&(a, b, r)| match (offsets[a], offsets[b]) {
            (Some(o), None) => Some((b, o, r)),
            (None, Some(o)) => Some((a, o, r)),
            _ => None,
        });
        match next {
            None => {
                let vals: Vec<i64> = offsets.iter().map(|o| o.expect("connected component")).collect();
                let lo = *vals.iter().min().expect("nonempty");
                let hi = *vals.iter().max().expect("nonempty");
                if (hi - lo) as usize >= n {
                    return;
                }
                let ok = local.iter().all(|&(a, b, r)| (vals[a] - vals[b]).unsigned_abs() as usize <= r);
                if ok {
                    shapes.insert(vals.iter().map(|v| (v - lo) as usize).collect());
                }
            }
            Some((v, anchor, r)) => {
                let r = r as i64;
                for o in anchor - r..=anchor + r {
                    if offsets.iter().any(|&x| x == Some(o)) {
                        continue;
                    }
                    offsets[v] = Some(o);
                    rec(offsets, local, n, shapes);
                    offsets[v] = None;
                }
            }
        }
    }
    rec(&mut offsets, &local, n, &mut shapes);
    shapes.into_iter().collect()
}

fn band_probability(n: usize, items: &BTreeSet<usize>, constraints: &[Constraint]) -> Result<Q> {
    let item_list: Vec<usize> = items.iter().copied().collect();
    let pos = |i: usize| item_list.binary_search(&i).expect("known item");
    let mut fixed: BTreeMap<usize, usize> = BTreeMap::new();
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut uf = UnionFind::<usize>::new(item_list.len());
    for c in constraints {
        match *c {
            Constraint::Equal(a, b) => {
                if a != b {
                    return Ok(Q::zero());
                }
            }
            Constraint::Fixed(a, v) => {
                if fixed.insert(a, v).is_some_and(|w| w != v) {
                    return Ok(Q::zero());
                }
            }
            Constraint::Band { a, b, rho } => {
                if a != b {
                    edges.push((a, b, rho));
                    uf.union(pos(a), pos(b));
                }
            }
        }
    }
    if fixed.values().collect::<BTreeSet<_>>().len() != fixed.len() {
        return Ok(Q::zero());
    }
    let labels = uf.into_labeling();
    let mut comp_items: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &root) in labels.iter().enumerate() {
        comp_items.entry(root).or_default().push(item_list[i]);
    }
    let mut comps = Vec::new();
    for items in comp_items.into_values() {
        let set: BTreeSet<usize> = items.iter().copied().collect();
        let comp_edges: Vec<_> = edges.iter().copied().filter(|e| set.contains(&e.0)).collect();
        let shapes = component_shapes(&items, &comp_edges, n);
        if shapes.is_empty() {
            return Ok(Q::zero());
        }
        comps.push(Component { items, shapes });
    }
    // Larger shape counts last: the last two components are counted in closed form.
    comps.sort_by_key(|c| c.shapes.len());
    let count = count_placements(n, &comps, &fixed);
    Ok(Q::new(count, falling_factorial(n as u64, item_list.len() as u64)))
}

/// Admissible translations of a shape given occupied positions and fixed items.
fn translations(n: usize, comp: &Component, shape: &[usize], occupied: &[bool], fixed: &BTreeMap<usize, usize>) -> Vec<usize> {
    let span = *shape.iter().max().expect("nonempty shape");
    let mut forced: Option<i64> = None;
    for (i, &item) in comp.items.iter().enumerate() {
        if let Some(&v) = fixed.get(&item) {
            let t = v as i64 - shape[i] as i64;
            if forced.is_some_and(|f| f != t) {
                return Vec::new();
            }
            forced = Some(t);
        }
    }
    let range: Vec<usize> = match forced {
        Some(t) if t < 0 || t as usize + span >= n => Vec::new(),
        Some(t) => vec![t as usize],
        None => (0..n - span).collect(),
    };
    range
        .into_iter()
        .filter(|&t| shape.iter().all(|&o| !occupied[t + o]))
        .collect()
}

fn count_placements(n: usize, comps: &[Component], fixed: &BTreeMap<usize, usize>) -> BigInt {
    let mut occupied = vec![false; n];
    let mut total = BigInt::zero();
    place(n, comps, 0, fixed, &mut occupied, &mut total);
    total
}

fn place(n: usize, comps: &[Component], i: usize, fixed: &BTreeMap<usize, usize>, occupied: &mut [bool], total: &mut BigInt) {
    let remaining = comps.len() - i;
    if remaining == 0 {
        *total += 1;
        return;
    }
    if remaining == 1 {
        for shape in &comps[i].shapes {
            *total += translations(n, &comps[i], shape, occupied, fixed).len();
        }
        return;
    }
    if remaining == 2 {
        let (a, b) = (&comps[i], &comps[i + 1]);
        for sa in &a.shapes {
            let ta = translations(n, a, sa, occupied, fixed);
            if ta.is_empty() {
                continue;
            }
            for sb in &b.shapes {
                let tb = translations(n, b, sb, occupied, fixed);
                if tb.is_empty() {
                    continue;
                }
                let mut in_tb = vec![false; n];
                for &t in &tb {
                    in_tb[t] = true;
                }
                // Collision iff tb - ta is a difference of offsets a - b.
                let diffs: BTreeSet<i64> = sa
                    .iter()
                    .cartesian_product(sb.iter())
                    .map(|(&x, &y)| x as i64 - y as i64)
                    .collect();
                let mut colliding = 0usize;
                for &d in &diffs {
                    colliding += ta
                        .iter()
                        .filter(|&&t| {
                            let u = t as i64 + d;
                            u >= 0 && (u as usize) < n && in_tb[u as usize]
                        })
                        .count();
                }
                *total += ta.len() * tb.len() - colliding;
            }
        }
        return;
    }
    for shape in &comps[i].shapes {
        for t in translations(n, &comps[i], shape, occupied, fixed) {
            for &o in shape {
                occupied[t + o] = true;
            }
            place(n, comps, i + 1, fixed, occupied, total);
            for &o in shape {
                occupied[t + o] = false;
            }
        }
    }
}

/// Largest number of latent configurations visited by [`exhaustive_latent_probability`].
pub const MAX_EXHAUSTIVE_LATENTS: u128 = 10_000_000;

/// Probability by exhaustive enumeration of every latent configuration.
///
/// Independent of [`latent_moment`]; intended as a test oracle on tiny models.
pub fn exhaustive_latent_probability(model: &LatentModel, constraints: &[Constraint]) -> Result<Q> {
    validate(model, constraints)?;
    let holds = |labels: &[usize]| {
        constraints.iter().all(|c| match *c {
            Constraint::Equal(a, b) => labels[a] == labels[b],
            Constraint::Fixed(a, v) => labels[a] == v,
            Constraint::Band { a, b, rho } => labels[a].abs_diff(labels[b]) <= rho,
        })
    };
    let mut hits = 0u64;
    let mut total = 0u64;
    match *model {
        LatentModel::Permutation { n } => {
            check_exhaustive((1..=n as u128).product())?;
            for perm in (0..n).permutations(n) {
                total += 1;
                hits += u64::from(holds(&perm));
            }
        }
        LatentModel::MultiPermutation { k, m } => {
            let per: u128 = (1..=k as u128).product();
            check_exhaustive(per.pow(m as u32))?;
            let perms: Vec<Vec<usize>> = (0..k).permutations(k).collect();
            for tuple in (0..m).map(|_| perms.iter()).multi_cartesian_product() {
                let labels: Vec<usize> = tuple.iter().flat_map(|p| p.iter().copied()).collect();
                total += 1;
                hits += u64::from(holds(&labels));
            }
        }
        LatentModel::Balanced { n, k } => {
            check_exhaustive((k as u128).pow(n as u32))?;
            let cap = n / k;
            for labels in (0..n).map(|_| 0..k).multi_cartesian_product() {
                let mut counts = vec![0usize; k];
                for &l in &labels {
                    counts[l] += 1;
                }
                if counts.iter().all(|&c| c == cap) {
                    total += 1;
                    hits += u64::from(holds(&labels));
                }
            }
        }
    }
    Ok(Q::new(BigInt::from(hits), BigInt::from(total)))
}

fn check_exhaustive(count: u128) -> Result<()> {
    if count > MAX_EXHAUSTIVE_LATENTS {
        return Err(Error::size("latent configurations", count, MAX_EXHAUSTIVE_LATENTS));
    }
    Ok(())
}

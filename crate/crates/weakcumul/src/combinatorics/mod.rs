//! Set partitions, pairings, multi-indices and graph primitives.

pub mod graph;
pub mod multi_index;
pub mod pairing;
pub mod partition;

pub use graph::{connected_components, max_weight_spanning_tree_weight, WeightedGraph};
pub use multi_index::{alpha_summary, AlphaSummary, Cell, GridKind, MultiIndex};
pub use pairing::{enumerate_pairings, enumerate_pairings_by_key, Pairing};
pub use partition::{
    enumerate_set_partitions, for_each_partition_masks, for_each_partition_of_mask, mobius_weight,
    mobius_weight_for_blocks, SetPartition, SetPartitions,
};

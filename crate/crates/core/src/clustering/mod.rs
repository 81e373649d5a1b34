//! Network decompositions: k-means++, the cellular and BS-clustering
//! baselines, capacity-balancing refinement and a brute-force oracle.

mod baselines;
mod exhaustive;
mod kmeans;
mod refine;

pub use baselines::{bs_clustering_partition, cellular_partition, nearest_bs};
pub use exhaustive::{
    enumerate_reports, exhaustive_maxmin, for_each_partition, ExhaustiveResult,
    DEFAULT_ENUMERATION_CAP,
};
pub use kmeans::kmeans_pp;
pub use refine::{cgn_refine, IterationRecord, Move, RefinementConfig, RefinementTrace, StopReason};

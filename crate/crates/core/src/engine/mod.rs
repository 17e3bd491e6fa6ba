//! Bottom-up aggregation of small contingency-table cells into clusters
//! joined through near-independent log-odds ratios.

mod cluster;
mod config;
mod distance;
mod run;
mod stats;

pub use cluster::{
    AggregationTrace, ClosingReason, Cluster, ClusterMap, Phase, Termination, TraceStep,
};
pub use config::{relax_threshold, IlocaConfig, Mode};
pub use distance::{candidate_distances, closest_cell, select_generator, CandidateDistance};
pub use run::{assign_stragglers, run_iloca};
pub use stats::CellStats;

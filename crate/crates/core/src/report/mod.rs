//! File formats, run reports and the command drivers behind the `iloca`
//! binary.
//!
//! Tables are plain CSV grids (optional header row and label column).
//! Datasets are CSV with named columns `id, y, r, z1c, z2c` and optional
//! `z1, z2, z3`. Reports are pretty-printed JSON; see [`RunReport`].
//! Every file is written whole, through a temporary file and a rename.

mod commands;
mod dataset_file;
mod format;
mod run_report;
mod table_file;

pub use commands::{
    cmd_aggregate, cmd_impute, cmd_simulate_clustering, cmd_simulate_imputation, AggregateOptions,
    ClusteringStudyOptions, ImputationStudyOptions, ImputeOptions,
};
pub use dataset_file::{read_dataset, write_dataset, write_imputed, DatasetColumns};
pub use format::{format_full, format_sig6, write_atomic};
pub use run_report::{
    AggregationReport, AlthamReport, ClusterReport, ImputationStudyReport, ImputationSummary,
    RunReport, TableSummary, REPORT_SCHEMA,
};
pub use table_file::{coloured_values, read_table, LabelledGrid};

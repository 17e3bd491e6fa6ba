//! Cell-mean imputation, the baselines it is compared with, and the
//! Monte-Carlo accuracy metrics.

mod cells;
mod dataset;
mod estimator;
mod metrics;
mod quantile;
mod regression;

pub use cells::{CellStructure, ImputationCells};
pub use dataset::{SurveyDataset, SurveyRecord};
pub use estimator::{cell_mean_impute, EstimatorResult};
pub use metrics::{relative_bias, rrmse, Metric, MetricsReport, ReplicateMeans};
pub use quantile::{quantile_cells, quantile_cells_impute, quantile_sorted};
pub use regression::{deterministic_regression_impute, least_squares, RegressionForm};

use crate::engine::ClusterMap;
use crate::table::ContingencyTable;

/// Imputation cells from an aggregation result: one per cluster, one per
/// untouched positive cell.
pub fn build_imputation_cells(map: &ClusterMap, table: &ContingencyTable) -> ImputationCells {
    ImputationCells::from_cluster_map(map, table)
}

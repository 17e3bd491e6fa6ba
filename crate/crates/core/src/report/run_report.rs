use serde::{Deserialize, Serialize};

use crate::engine::{AggregationTrace, ClosingReason, ClusterMap, Phase, Termination, TraceStep};
use crate::imputation::{EstimatorResult, MetricsReport, SurveyDataset};
use crate::simgen::{ClusteringReport, ImputationReplicate, ImputationSetting};
use crate::table::{
    altham_hack, altham_index, enumerate_log_odds, CellIndex, ChiSquare, ContingencyTable,
};

/// Version tag of the report layout.
pub const REPORT_SCHEMA: u32 = 1;

/// Machine-readable record of one command run. Cells are zero-based
/// `{row, col}` pairs; optional sections are omitted when they do not
/// apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    pub version: String,
    /// Every option the run used, enough to repeat it exactly.
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub table: Option<TableSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chi_square: Option<ChiSquare>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub altham: Option<AlthamReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub aggregation: Option<AggregationReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub imputation: Option<ImputationSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub clustering_study: Option<ClusteringReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub imputation_study: Option<ImputationStudyReport>,
}

impl RunReport {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        RunReport {
            schema: REPORT_SCHEMA,
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            table: None,
            chi_square: None,
            altham: None,
            aggregation: None,
            imputation: None,
            clustering_study: None,
            imputation_study: None,
        }
    }

    pub fn to_json(&self) -> crate::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSummary {
    pub rows: usize,
    pub cols: usize,
    pub total: f64,
    /// Row-major counts.
    pub counts: Vec<Vec<f64>>,
}

impl TableSummary {
    pub fn of(table: &ContingencyTable) -> Self {
        let flat = table.counts();
        TableSummary {
            rows: table.rows(),
            cols: table.cols(),
            total: table.total(),
            counts: flat.chunks(table.cols()).map(<[f64]>::to_vec).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlthamReport {
    pub original: f64,
    pub augmented: f64,
    pub n_phi_original: usize,
    pub n_phi_augmented: usize,
    /// `augmented / original`, absent when the original index is zero.
    pub retention: Option<f64>,
}

impl AlthamReport {
    pub fn of(table: &ContingencyTable, map: &ClusterMap) -> Self {
        let orig = altham_index(&enumerate_log_odds(table));
        let aug = altham_hack(table, map);
        AlthamReport {
            original: orig.l,
            augmented: aug.l,
            n_phi_original: orig.n_phi,
            n_phi_augmented: aug.n_phi,
            retention: (orig.l > 0.0).then(|| aug.l / orig.l),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub id: i32,
    pub cells: Vec<CellIndex>,
    pub members: usize,
    pub total: f64,
    pub threshold: f64,
    pub reason: ClosingReason,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationReport {
    pub clusters: Vec<ClusterReport>,
    pub untouched: Vec<CellIndex>,
    pub empty: Vec<CellIndex>,
    pub undersized_singletons: Vec<CellIndex>,
    /// Cluster ids in assigned cells, counts elsewhere, row-major.
    pub coloured: Vec<Vec<f64>>,
    pub termination: Termination,
    pub trace: Vec<TraceStep>,
}

impl AggregationReport {
    pub fn of(
        table: &ContingencyTable,
        map: &ClusterMap,
        trace: &AggregationTrace,
        coloured: &[f64],
    ) -> Self {
        AggregationReport {
            clusters: map
                .clusters()
                .iter()
                .map(|c| ClusterReport {
                    id: c.id.get(),
                    cells: c.members.clone(),
                    members: c.members.len(),
                    total: c.total,
                    threshold: c.threshold,
                    reason: c.reason,
                    phase: c.phase,
                })
                .collect(),
            untouched: map.untouched.clone(),
            empty: map.empty.clone(),
            undersized_singletons: map.undersized_singletons.clone(),
            coloured: coloured.chunks(table.cols()).map(<[f64]>::to_vec).collect(),
            termination: trace.termination,
            trace: trace.steps.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputationSummary {
    pub records: usize,
    pub respondents: usize,
    pub response_rate: f64,
    pub respondent_mean: f64,
    /// Overall imputed mean (plain mean of `w`).
    pub imputed_mean: f64,
    pub mixture_mean: f64,
    /// Mean of the full response when every record carried `y`.
    pub actual_mean: Option<f64>,
    pub cells: usize,
    pub occupied_cells: usize,
    pub fallback_cells: usize,
    pub cell_sizes: Vec<usize>,
    pub cell_means: Vec<Option<f64>>,
}

impl ImputationSummary {
    pub fn of(dataset: &SurveyDataset, result: &EstimatorResult, cells: usize) -> Self {
        ImputationSummary {
            records: dataset.len(),
            respondents: dataset.respondents(),
            response_rate: dataset.response_rate(),
            respondent_mean: dataset.respondent_mean().unwrap_or(f64::NAN),
            imputed_mean: result.imputed_mean,
            mixture_mean: result.mixture_mean,
            actual_mean: result.actual_mean,
            cells,
            occupied_cells: result.occupied_cells(),
            fallback_cells: result.fallback_cells,
            cell_sizes: result.cell_sizes[..cells].to_vec(),
            cell_means: result.cell_means[..cells].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputationStudyReport {
    pub setting: ImputationSetting,
    pub metrics: MetricsReport,
    pub replicates: Vec<ImputationReplicate>,
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    apply_response, gen_blocked_table, gen_dataset, gen_kass_table, replicate_rng, ColumnLaw,
    DgpConfig, DgpKind, ResponseModel, ResponseModelConfig,
};
use crate::engine::{run_iloca, IlocaConfig, Termination};
use crate::imputation::{
    build_imputation_cells, cell_mean_impute, deterministic_regression_impute,
    quantile_cells_impute, ImputationCells, Metric, MetricsReport, RegressionForm, ReplicateMeans,
};
use crate::table::{
    altham_hack, altham_index, central_peak_profile, chi_square_independence, enumerate_log_odds,
    CellIndex, ChiSquare,
};
use crate::{Error, Result};

/// One imputation setting: data process, response model and aggregation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputationSetting {
    pub dgp: DgpConfig,
    pub response: ResponseModelConfig,
    pub iloca: IlocaConfig,
    /// Quantile-cell counts swept as an oracle baseline.
    pub quantiles: Vec<usize>,
}

impl ImputationSetting {
    /// Standard settings for a DGP, response model and rate, with
    /// imputation-mode aggregation at `M0 = 20`.
    pub fn standard(dgp: DgpKind, model: ResponseModel, rate: f64, misspec: bool) -> Result<Self> {
        Ok(ImputationSetting {
            dgp: DgpConfig::new(dgp, misspec),
            response: ResponseModelConfig::standard(dgp, model, rate)?,
            iloca: IlocaConfig::imputation(),
            quantiles: (1..=7).map(|q| 5 * q).collect(),
        })
    }

    pub fn label(&self) -> String {
        let dgp = match self.dgp.kind {
            DgpKind::Dgp1 => "dgp1",
            DgpKind::Dgp2 => "dgp2",
        };
        let rm = match self.response.model {
            ResponseModel::Rm1 => "rm1",
            ResponseModel::Rm2 => "rm2",
        };
        let suffix = if self.dgp.misspec { "/misspec" } else { "" };
        format!(
            "{dgp}/{rm}/{:.0}%{suffix}",
            100.0 * self.response.target_rate
        )
    }

    fn regression_form(&self) -> RegressionForm {
        match self.dgp.kind {
            DgpKind::Dgp1 => RegressionForm::RankLinear,
            DgpKind::Dgp2 => RegressionForm::Quadratic,
        }
    }
}

/// Outcome of one imputation replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputationReplicate {
    pub replicate: usize,
    pub true_mean: f64,
    pub response_rate: f64,
    pub lambda0: f64,
    pub iloca_cells: usize,
    pub iloca_clusters: usize,
    pub termination: Termination,
    /// Imputed overall mean per estimator, in a fixed order.
    pub estimates: Vec<(String, f64)>,
}

/// Runs one replicate of an imputation setting on its own stream.
pub fn imputation_replicate(
    setting: &ImputationSetting,
    seed: u64,
    replicate: usize,
) -> Result<ImputationReplicate> {
    let mut rng = replicate_rng(seed, replicate);
    let mut dataset = gen_dataset(&setting.dgp, &mut rng)?;
    let draw = apply_response(&mut dataset, &setting.response, setting.dgp.kind, &mut rng)?;

    let table = dataset.atomic_table()?;
    let stats = dataset.cell_stats()?;
    let (map, trace) = run_iloca(&table, &setting.iloca, Some(&stats))?;
    let iloca = build_imputation_cells(&map, &table);

    let mut estimates = Vec::new();
    let iloca_result = cell_mean_impute(&dataset, &iloca)?;
    estimates.push(("iloca".to_string(), iloca_result.imputed_mean));
    let null = cell_mean_impute(&dataset, &ImputationCells::null(table.rows(), table.cols()))?;
    estimates.push(("null".to_string(), null.imputed_mean));
    let atomic = cell_mean_impute(&dataset, &ImputationCells::atomic(&table))?;
    estimates.push(("atomic".to_string(), atomic.imputed_mean));
    let reg = deterministic_regression_impute(&dataset, setting.regression_form())?;
    estimates.push(("regression".to_string(), reg.imputed_mean));
    for &q in &setting.quantiles {
        let r = quantile_cells_impute(&dataset, q)?;
        estimates.push((format!("quantile_{q}"), r.imputed_mean));
    }

    Ok(ImputationReplicate {
        replicate,
        true_mean: dataset.true_mean().ok_or_else(|| {
            Error::InvalidDataset("simulated data must carry the full response".into())
        })?,
        response_rate: draw.realized_rate,
        lambda0: draw.lambda0,
        iloca_cells: iloca_result.occupied_cells(),
        iloca_clusters: map.len(),
        termination: trace.termination,
        estimates,
    })
}

/// All replicates of a setting, evaluated in parallel, in replicate order.
pub fn simulate_replicates(
    setting: &ImputationSetting,
    reps: usize,
    seed: u64,
) -> Result<Vec<ImputationReplicate>> {
    if reps == 0 {
        return Err(Error::NoReplicates);
    }
    setting.iloca.validate()?;
    setting.dgp.validate()?;
    setting.response.validate()?;
    (0..reps)
        .into_par_iter()
        .map(|r| imputation_replicate(setting, seed, r))
        .collect()
}

/// RB and RRMSE per estimator over a replicate set.
pub fn summarize_replicates(label: &str, reps: &[ImputationReplicate]) -> Result<MetricsReport> {
    let first = reps.first().ok_or(Error::NoReplicates)?;
    let mut estimators = Vec::with_capacity(first.estimates.len());
    for (idx, (name, _)) in first.estimates.iter().enumerate() {
        let means: Vec<ReplicateMeans> = reps
            .iter()
            .map(|r| ReplicateMeans {
                imputed: r.estimates[idx].1,
                actual: r.true_mean,
            })
            .collect();
        estimators.push((name.clone(), Metric::from_replicates(&means)?));
    }
    let k = reps.len() as f64;
    Ok(MetricsReport {
        setting: label.to_string(),
        replicates: reps.len(),
        estimators,
        mean_iloca_cells: reps.iter().map(|r| r.iloca_cells as f64).sum::<f64>() / k,
        mean_response_rate: reps.iter().map(|r| r.response_rate).sum::<f64>() / k,
    })
}

/// Runs `reps` seeded replicates of `setting` and summarizes them.
pub fn run_simulation_study(
    setting: &ImputationSetting,
    reps: usize,
    seed: u64,
) -> Result<MetricsReport> {
    let replicates = simulate_replicates(setting, reps, seed)?;
    summarize_replicates(&setting.label(), &replicates)
}

/// One synthetic-table clustering setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringSetting {
    pub n_obs: usize,
    pub rows: usize,
    pub cols: usize,
    pub law: ColumnLaw,
    pub iloca: IlocaConfig,
    /// Significance level of the independence test.
    pub alpha: f64,
}

impl ClusteringSetting {
    pub fn new(rows: usize, cols: usize, law: ColumnLaw) -> Self {
        ClusteringSetting {
            n_obs: 480,
            rows,
            cols,
            law,
            iloca: IlocaConfig::default(),
            alpha: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringReplicate {
    pub replicate: usize,
    pub chi_square: ChiSquare,
    /// Member count of each cluster, in id order (-1, -2, ...).
    pub cluster_sizes: Vec<usize>,
    pub altham_original: f64,
    pub altham_augmented: f64,
    /// Column with the largest total.
    pub dominant_column: usize,
    /// Whether every cell of that column with count >= `M0` stayed out of
    /// all clusters.
    pub dominant_untouched: bool,
    pub undersized_singletons: usize,
    pub termination: Termination,
}

pub fn clustering_replicate(
    setting: &ClusteringSetting,
    seed: u64,
    replicate: usize,
) -> Result<ClusteringReplicate> {
    let mut rng = replicate_rng(seed, replicate);
    let kass = gen_kass_table(
        setting.n_obs,
        setting.rows,
        setting.cols,
        setting.law,
        &mut rng,
    )?;
    let table = kass.table;
    let chi_square = chi_square_independence(&table)?;
    let (map, trace) = run_iloca(&table, &setting.iloca, None)?;

    let cols = table.col_totals();
    let dominant_column = (0..cols.len())
        .max_by(|&a, &b| cols[a].total_cmp(&cols[b]).then(b.cmp(&a)))
        .expect("a table has columns");
    let dominant_untouched = (0..table.rows())
        .map(|i| CellIndex::new(i, dominant_column))
        .filter(|&c| {
            table
                .count(c)
                .is_some_and(|v| v >= setting.iloca.min_cell_size)
        })
        .all(|c| map.cluster_of(c).is_none());

    Ok(ClusteringReplicate {
        replicate,
        chi_square,
        cluster_sizes: map.clusters().iter().map(|c| c.members.len()).collect(),
        altham_original: altham_index(&enumerate_log_odds(&table)).l,
        altham_augmented: altham_hack(&table, &map).l,
        dominant_column,
        dominant_untouched,
        undersized_singletons: map.undersized_singletons.len(),
        termination: trace.termination,
    })
}

/// Average membership of one cluster label across replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColourSummary {
    pub id: i32,
    /// Replicates in which the label occurs.
    pub present: usize,
    /// Mean member count over those replicates.
    pub mean_members: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringReport {
    pub setting: ClusteringSetting,
    pub replicates: Vec<ClusteringReplicate>,
    /// Tables whose independence test is not significant at `alpha`.
    pub non_significant: usize,
    pub mean_clusters: f64,
    pub colours: Vec<ColourSummary>,
    pub mean_altham_original: f64,
    pub mean_altham_augmented: f64,
    /// Mean augmented index over mean original index.
    pub retention: f64,
    /// Mean of the per-replicate ratios (tables with a zero index skipped).
    pub mean_retention_ratio: f64,
    pub dominant_untouched: usize,
}

impl ClusteringReport {
    /// Colours occurring in at least `share` of the replicates.
    pub fn common_colours(&self, share: f64) -> impl Iterator<Item = &ColourSummary> {
        let min = share * self.replicates.len() as f64;
        self.colours.iter().filter(move |c| c.present as f64 >= min)
    }
}

pub fn run_clustering_study(
    setting: &ClusteringSetting,
    reps: usize,
    seed: u64,
) -> Result<ClusteringReport> {
    if reps == 0 {
        return Err(Error::NoReplicates);
    }
    setting.iloca.validate()?;
    let replicates: Vec<ClusteringReplicate> = (0..reps)
        .into_par_iter()
        .map(|r| clustering_replicate(setting, seed, r))
        .collect::<Result<_>>()?;
    let k = reps as f64;

    let max_clusters = replicates
        .iter()
        .map(|r| r.cluster_sizes.len())
        .max()
        .unwrap_or(0);
    let colours = (0..max_clusters)
        .map(|ord| {
            let sizes: Vec<usize> = replicates
                .iter()
                .filter_map(|r| r.cluster_sizes.get(ord).copied())
                .collect();
            ColourSummary {
                id: -(ord as i32) - 1,
                present: sizes.len(),
                mean_members: sizes.iter().sum::<usize>() as f64 / sizes.len() as f64,
            }
        })
        .collect();

    let mean_altham_original = replicates.iter().map(|r| r.altham_original).sum::<f64>() / k;
    let mean_altham_augmented = replicates.iter().map(|r| r.altham_augmented).sum::<f64>() / k;
    let ratios: Vec<f64> = replicates
        .iter()
        .filter(|r| r.altham_original > 0.0)
        .map(|r| r.altham_augmented / r.altham_original)
        .collect();

    Ok(ClusteringReport {
        non_significant: replicates
            .iter()
            .filter(|r| !r.chi_square.significant_at(setting.alpha))
            .count(),
        mean_clusters: replicates
            .iter()
            .map(|r| r.cluster_sizes.len() as f64)
            .sum::<f64>()
            / k,
        colours,
        mean_altham_original,
        mean_altham_augmented,
        retention: mean_altham_augmented / mean_altham_original,
        mean_retention_ratio: ratios.iter().sum::<f64>() / ratios.len().max(1) as f64,
        dominant_untouched: replicates.iter().filter(|r| r.dominant_untouched).count(),
        setting: setting.clone(),
        replicates,
    })
}

/// Blocked-versus-uniform table comparison of near-zero log-odds shares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockedSetting {
    pub n_obs: usize,
    pub rows: usize,
    pub n_left: usize,
    pub n_right: usize,
    /// Right-block column weight relative to a left-block column.
    pub ratio: f64,
    pub threshold: f64,
}

impl Default for BlockedSetting {
    fn default() -> Self {
        BlockedSetting {
            n_obs: 960,
            rows: 8,
            n_left: 7,
            n_right: 1,
            ratio: 10.0,
            threshold: 0.5,
        }
    }
}

/// Left-block shares of `|phi| < threshold` for one blocked table and a
/// uniform table of the same shape and size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockedPair {
    pub blocked: f64,
    pub uniform: f64,
}

pub fn blocked_pairs(
    setting: &BlockedSetting,
    pairs: usize,
    seed: u64,
) -> Result<Vec<BlockedPair>> {
    let left: Vec<usize> = (0..setting.n_left).collect();
    (0..pairs)
        .into_par_iter()
        .map(|p| {
            let share = |ratio: f64, stream: usize| -> Result<f64> {
                let mut rng = replicate_rng(seed, stream);
                let t = gen_blocked_table(
                    setting.n_obs,
                    setting.rows,
                    setting.n_left,
                    setting.n_right,
                    ratio,
                    &mut rng,
                )?;
                Ok(central_peak_profile(&t, &left, setting.threshold)
                    .left
                    .near_zero
                    .unwrap_or(0.0))
            };
            Ok(BlockedPair {
                blocked: share(setting.ratio, 2 * p)?,
                uniform: share(1.0, 2 * p + 1)?,
            })
        })
        .collect()
}

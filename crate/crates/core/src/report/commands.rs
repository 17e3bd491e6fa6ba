use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::dataset_file::{read_dataset, write_imputed};
use super::format::{format_full, write_atomic};
use super::run_report::{
    AggregationReport, AlthamReport, ImputationStudyReport, ImputationSummary, RunReport,
    TableSummary,
};
use super::table_file::{coloured_values, read_table};
use crate::engine::{run_iloca, IlocaConfig, Mode};
use crate::imputation::{build_imputation_cells, cell_mean_impute};
use crate::simgen::{
    run_clustering_study, simulate_replicates, summarize_replicates, ClusteringSetting, ColumnLaw,
    DgpConfig, DgpKind, ImputationSetting, ResponseModel, ResponseModelConfig,
};
use crate::table::{chi_square_independence, ContingencyTable};
use crate::{Error, Result};

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn echo<T: Serialize>(opts: &T) -> serde_json::Value {
    serde_json::to_value(opts).expect("options serialise")
}

fn diagnostics(report: &mut RunReport, table: &ContingencyTable) {
    report.table = Some(TableSummary::of(table));
    // A zero marginal leaves the test undefined; the run goes on without it.
    report.chi_square = chi_square_independence(table).ok();
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateOptions {
    pub input: PathBuf,
    /// Dataset whose respondents supply per-cell means and SDs
    /// (imputation mode only).
    pub stats: Option<PathBuf>,
    pub iloca: IlocaConfig,
    pub out: PathBuf,
}

/// Aggregates a count table; writes `report.json` and `coloured.csv`.
pub fn cmd_aggregate(opts: &AggregateOptions) -> Result<RunReport> {
    opts.iloca.validate()?;
    let (table, grid) = read_table(open(&opts.input)?)?;
    let stats = match (&opts.stats, opts.iloca.mode) {
        (Some(path), Mode::Imputation) => {
            let (data, _) = read_dataset(open(path)?)?;
            if data.rows() > table.rows() || data.cols() > table.cols() {
                return Err(Error::InvalidDataset(format!(
                    "stats dataset uses a {}x{} grid but the table is {}x{}",
                    data.rows(),
                    data.cols(),
                    table.rows(),
                    table.cols()
                )));
            }
            let data = crate::imputation::SurveyDataset::new(
                table.rows(),
                table.cols(),
                data.records().to_vec(),
            )?;
            Some(data.cell_stats()?)
        }
        (None, Mode::Imputation) => return Err(Error::MissingStats),
        (_, Mode::Frequency) => None,
    };

    let mut report = RunReport::new("aggregate", echo(opts));
    diagnostics(&mut report, &table);
    let (map, trace) = run_iloca(&table, &opts.iloca, stats.as_ref())?;
    let coloured = coloured_values(&table, &map);
    report.altham = Some(AlthamReport::of(&table, &map));
    report.aggregation = Some(AggregationReport::of(&table, &map, &trace, &coloured));

    prepare_out(&opts.out)?;
    write_atomic(
        &opts.out.join("coloured.csv"),
        grid.with_values(coloured).to_csv()?.as_bytes(),
    )?;
    write_atomic(&opts.out.join("report.json"), report.to_json()?.as_bytes())?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputeOptions {
    pub input: PathBuf,
    pub iloca: IlocaConfig,
    pub out: PathBuf,
}

/// Aggregates the dataset's atomic table and imputes with the resulting
/// cells; writes `imputed.csv` and `report.json`.
pub fn cmd_impute(opts: &ImputeOptions) -> Result<RunReport> {
    opts.iloca.validate()?;
    let (dataset, columns) = read_dataset(open(&opts.input)?)?;
    if dataset.respondents() == 0 {
        return Err(Error::NoRespondents);
    }
    let table = dataset.atomic_table()?;
    let stats = dataset.cell_stats()?;

    let mut report = RunReport::new("impute", echo(opts));
    diagnostics(&mut report, &table);
    let (map, trace) = run_iloca(&table, &opts.iloca, Some(&stats))?;
    let cells = build_imputation_cells(&map, &table);
    let result = cell_mean_impute(&dataset, &cells)?;

    let coloured = coloured_values(&table, &map);
    report.altham = Some(AlthamReport::of(&table, &map));
    report.aggregation = Some(AggregationReport::of(&table, &map, &trace, &coloured));
    report.imputation = Some(ImputationSummary::of(&dataset, &result, cells.n_cells()));

    prepare_out(&opts.out)?;
    write_atomic(
        &opts.out.join("imputed.csv"),
        write_imputed(&dataset, columns, &result)?.as_bytes(),
    )?;
    write_atomic(&opts.out.join("report.json"), report.to_json()?.as_bytes())?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringStudyOptions {
    pub rows: usize,
    pub cols: usize,
    pub law: ColumnLaw,
    pub n_obs: usize,
    pub iloca: IlocaConfig,
    pub reps: usize,
    pub seed: u64,
    pub out: PathBuf,
}

fn csv_string(rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Malformed(e.to_string()))
}

/// Synthetic-table clustering study. Writes `report.json`, per-colour
/// averages in `colours.csv` and per-replicate indices in `altham.csv`.
pub fn cmd_simulate_clustering(opts: &ClusteringStudyOptions) -> Result<RunReport> {
    let setting = ClusteringSetting {
        n_obs: opts.n_obs,
        rows: opts.rows,
        cols: opts.cols,
        law: opts.law,
        iloca: opts.iloca.clone(),
        alpha: 0.05,
    };
    if opts.iloca.mode != Mode::Frequency {
        return Err(Error::InvalidConfig(
            "the clustering study has no responses; use frequency mode".into(),
        ));
    }
    if opts.rows < 2 || opts.cols < 2 || opts.n_obs < opts.rows * opts.cols {
        return Err(Error::InvalidConfig(format!(
            "{} records cannot fill a {}x{} table",
            opts.n_obs, opts.rows, opts.cols
        )));
    }
    let study = run_clustering_study(&setting, opts.reps, opts.seed)?;

    let mut colours = vec![vec![
        "colour".into(),
        "replicates".into(),
        "mean_cells".into(),
    ]];
    colours.extend(study.colours.iter().map(|c| {
        vec![
            c.id.to_string(),
            c.present.to_string(),
            format_full(c.mean_members),
        ]
    }));
    let mut altham = vec![vec![
        "replicate".into(),
        "chi_square".into(),
        "p_value".into(),
        "clusters".into(),
        "l_original".into(),
        "l_augmented".into(),
    ]];
    altham.extend(study.replicates.iter().map(|r| {
        vec![
            r.replicate.to_string(),
            format_full(r.chi_square.statistic),
            format_full(r.chi_square.p_value),
            r.cluster_sizes.len().to_string(),
            format_full(r.altham_original),
            format_full(r.altham_augmented),
        ]
    }));

    let mut report = RunReport::new("simulate-clustering", echo(opts));
    report.clustering_study = Some(study);
    prepare_out(&opts.out)?;
    write_atomic(
        &opts.out.join("colours.csv"),
        csv_string(colours)?.as_bytes(),
    )?;
    write_atomic(&opts.out.join("altham.csv"), csv_string(altham)?.as_bytes())?;
    write_atomic(&opts.out.join("report.json"), report.to_json()?.as_bytes())?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputationStudyOptions {
    pub dgp: DgpKind,
    pub response_model: ResponseModel,
    pub rate: f64,
    pub misspec: bool,
    /// Overrides the default (on for DGP2, off for DGP1).
    pub calibrate: Option<bool>,
    pub iloca: IlocaConfig,
    pub reps: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl ImputationStudyOptions {
    pub fn setting(&self) -> Result<ImputationSetting> {
        let mut response = ResponseModelConfig::standard(self.dgp, self.response_model, self.rate)?;
        if let Some(c) = self.calibrate {
            response.calibrate = c;
        }
        if self.iloca.mode != Mode::Imputation {
            return Err(Error::InvalidConfig(
                "the imputation study aggregates in imputation mode".into(),
            ));
        }
        Ok(ImputationSetting {
            dgp: DgpConfig::new(self.dgp, self.misspec),
            response,
            iloca: self.iloca.clone(),
            quantiles: (1..=7).map(|q| 5 * q).collect(),
        })
    }
}

/// Imputation study for one setting. Writes `report.json`, RB/RRMSE per
/// estimator in `metrics.csv` and per-replicate estimates in
/// `replicates.csv`.
pub fn cmd_simulate_imputation(opts: &ImputationStudyOptions) -> Result<RunReport> {
    let setting = opts.setting()?;
    let replicates = simulate_replicates(&setting, opts.reps, opts.seed)?;
    let metrics = summarize_replicates(&setting.label(), &replicates)?;

    let mut table = vec![vec!["estimator".into(), "rb".into(), "rrmse".into()]];
    table.extend(
        metrics
            .estimators
            .iter()
            .map(|(name, m)| vec![name.clone(), format_full(m.rb), format_full(m.rrmse)]),
    );
    let mut reps = vec![[
        "replicate",
        "true_mean",
        "response_rate",
        "lambda0",
        "iloca_cells",
    ]
    .iter()
    .map(|s| s.to_string())
    .chain(replicates[0].estimates.iter().map(|(n, _)| n.clone()))
    .collect::<Vec<String>>()];
    reps.extend(replicates.iter().map(|r| {
        let mut row = vec![
            r.replicate.to_string(),
            format_full(r.true_mean),
            format_full(r.response_rate),
            format_full(r.lambda0),
            r.iloca_cells.to_string(),
        ];
        row.extend(r.estimates.iter().map(|(_, v)| format_full(*v)));
        row
    }));

    let mut report = RunReport::new("simulate-imputation", echo(opts));
    report.imputation_study = Some(ImputationStudyReport {
        setting,
        metrics,
        replicates,
    });
    prepare_out(&opts.out)?;
    write_atomic(&opts.out.join("metrics.csv"), csv_string(table)?.as_bytes())?;
    write_atomic(
        &opts.out.join("replicates.csv"),
        csv_string(reps)?.as_bytes(),
    )?;
    write_atomic(&opts.out.join("report.json"), report.to_json()?.as_bytes())?;
    Ok(report)
}

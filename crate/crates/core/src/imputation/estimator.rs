use serde::{Deserialize, Serialize};

use super::dataset::plain_mean;
use super::{ImputationCells, SurveyDataset};
use crate::{Error, Result};

/// A completed dataset and the imputed overall mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    /// Working variable per record: `y` for respondents, the imputed value
    /// otherwise.
    pub w: Vec<f64>,
    /// Imputation cell per record.
    pub cell_ids: Vec<usize>,
    /// Respondent mean per cell, `None` where a cell had no respondents
    /// (such cells impute with the global respondent mean).
    pub cell_means: Vec<Option<f64>>,
    /// Records per cell.
    pub cell_sizes: Vec<usize>,
    /// Plain mean of `w`.
    pub imputed_mean: f64,
    /// The same estimate assembled as a size-weighted mixture of cell means.
    pub mixture_mean: f64,
    /// Mean of the full response, when every record carries `y`.
    pub actual_mean: Option<f64>,
    /// Cells holding non-respondents but no respondents.
    pub fallback_cells: usize,
}

impl EstimatorResult {
    /// Cells containing at least one record.
    pub fn occupied_cells(&self) -> usize {
        self.cell_sizes.iter().filter(|&&n| n > 0).count()
    }
}

/// Cell-mean imputation: every non-respondent takes the respondent mean
/// of its imputation cell.
pub fn cell_mean_impute(
    dataset: &SurveyDataset,
    cells: &ImputationCells,
) -> Result<EstimatorResult> {
    let global = dataset.respondent_mean().ok_or(Error::NoRespondents)?;
    let slots = cells.n_cells() + 1;
    let mut sums = vec![0.0; slots];
    let mut resp = vec![0usize; slots];
    let mut sizes = vec![0usize; slots];
    let mut cell_ids = Vec::with_capacity(dataset.len());

    for (t, rec) in dataset.records().iter().enumerate() {
        let c = cells.cell_of(t, rec)?;
        if c >= slots {
            return Err(Error::InvalidDataset(format!(
                "record {} mapped to cell {c} of {}",
                rec.id,
                cells.n_cells()
            )));
        }
        cell_ids.push(c);
        sizes[c] += 1;
        if let Some(y) = rec.observed() {
            sums[c] += y;
            resp[c] += 1;
        }
    }

    let cell_means: Vec<Option<f64>> = sums
        .iter()
        .zip(&resp)
        .map(|(&s, &n)| (n > 0).then(|| s / n as f64))
        .collect();
    let fallback_cells = (0..slots).filter(|&c| resp[c] == 0 && sizes[c] > 0).count();

    let w: Vec<f64> = dataset
        .records()
        .iter()
        .zip(&cell_ids)
        .map(|(rec, &c)| {
            rec.observed()
                .unwrap_or_else(|| cell_means[c].unwrap_or(global))
        })
        .collect();

    let n = w.len() as f64;
    let mut cell_w = vec![0.0; slots];
    for (&v, &c) in w.iter().zip(&cell_ids) {
        cell_w[c] += v;
    }
    let mixture_mean = (0..slots)
        .filter(|&c| sizes[c] > 0)
        .map(|c| sizes[c] as f64 / n * (cell_w[c] / sizes[c] as f64))
        .sum();

    Ok(EstimatorResult {
        imputed_mean: plain_mean(&w),
        mixture_mean,
        actual_mean: dataset.true_mean(),
        w,
        cell_ids,
        cell_means,
        cell_sizes: sizes,
        fallback_cells,
    })
}

use serde::{Deserialize, Serialize};

use crate::table::CellIndex;
use crate::{Error, Result};

/// Per-cell respondent means and standard deviations.
///
/// Cells without respondents carry the global mean and SD and are flagged
/// as fallbacks, so distance components stay finite for every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    rows: usize,
    cols: usize,
    mean: Vec<f64>,
    sd: Vec<f64>,
    respondents: Vec<usize>,
    fallback: Vec<bool>,
    pub global_mean: f64,
    pub global_sd: f64,
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

impl CellStats {
    /// Builds statistics from `(cell, response)` pairs of respondents only.
    pub fn from_responses<I>(rows: usize, cols: usize, responses: I) -> Result<Self>
    where
        I: IntoIterator<Item = (CellIndex, f64)>,
    {
        let mut per_cell: Vec<Vec<f64>> = vec![Vec::new(); rows * cols];
        let mut all = Vec::new();
        for (cell, y) in responses {
            if cell.row >= rows || cell.col >= cols {
                return Err(Error::CellOutOfRange {
                    row: cell.row,
                    col: cell.col,
                    rows,
                    cols,
                });
            }
            per_cell[cell.row * cols + cell.col].push(y);
            all.push(y);
        }
        if all.is_empty() {
            return Err(Error::NoRespondents);
        }
        let (global_mean, global_sd) = mean_sd(&all);

        let mut stats = CellStats {
            rows,
            cols,
            mean: Vec::with_capacity(rows * cols),
            sd: Vec::with_capacity(rows * cols),
            respondents: Vec::with_capacity(rows * cols),
            fallback: Vec::with_capacity(rows * cols),
            global_mean,
            global_sd,
        };
        for values in &per_cell {
            let (m, s, fb) = if values.is_empty() {
                (global_mean, global_sd, true)
            } else {
                let (m, s) = mean_sd(values);
                (m, s, false)
            };
            stats.mean.push(m);
            stats.sd.push(s);
            stats.respondents.push(values.len());
            stats.fallback.push(fb);
        }
        Ok(stats)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn idx(&self, cell: CellIndex) -> usize {
        cell.row * self.cols + cell.col
    }

    pub fn mean(&self, cell: CellIndex) -> f64 {
        self.mean[self.idx(cell)]
    }

    pub fn sd(&self, cell: CellIndex) -> f64 {
        self.sd[self.idx(cell)]
    }

    pub fn respondents(&self, cell: CellIndex) -> usize {
        self.respondents[self.idx(cell)]
    }

    pub fn is_fallback(&self, cell: CellIndex) -> bool {
        self.fallback[self.idx(cell)]
    }
}

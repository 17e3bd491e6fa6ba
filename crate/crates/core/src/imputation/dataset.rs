use serde::{Deserialize, Serialize};

use crate::engine::CellStats;
use crate::table::{CellIndex, ContingencyTable};
use crate::{Error, Result};

/// One survey unit. Class labels are one-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub id: String,
    /// The response. Simulated data keep the true value for
    /// non-respondents too; files leave it empty.
    pub y: Option<f64>,
    pub responded: bool,
    pub z1: Option<f64>,
    pub z2: Option<f64>,
    pub z3: Option<f64>,
    pub z1c: usize,
    pub z2c: usize,
}

impl SurveyRecord {
    /// The observed response: `y` if the unit responded.
    pub fn observed(&self) -> Option<f64> {
        if self.responded {
            self.y
        } else {
            None
        }
    }

    pub fn cell(&self) -> CellIndex {
        CellIndex::new(self.z1c - 1, self.z2c - 1)
    }
}

/// Records classified into an `rows x cols` grid of atomic cells. All
/// survey weights are one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyDataset {
    rows: usize,
    cols: usize,
    records: Vec<SurveyRecord>,
}

impl SurveyDataset {
    pub fn new(rows: usize, cols: usize, records: Vec<SurveyRecord>) -> Result<Self> {
        if rows < 1 || cols < 1 {
            return Err(Error::InvalidDataset("class grid must be non-empty".into()));
        }
        for r in &records {
            if r.responded && r.y.is_none() {
                return Err(Error::InvalidDataset(format!(
                    "record {} responded but has no y",
                    r.id
                )));
            }
            if r.z1c == 0 || r.z1c > rows || r.z2c == 0 || r.z2c > cols {
                return Err(Error::InvalidDataset(format!(
                    "record {} has class ({}, {}) outside 1..={rows} x 1..={cols}",
                    r.id, r.z1c, r.z2c
                )));
            }
        }
        Ok(SurveyDataset {
            rows,
            cols,
            records,
        })
    }

    /// Grid dimensions taken from the largest labels present.
    pub fn infer_grid(records: Vec<SurveyRecord>) -> Result<Self> {
        let rows = records.iter().map(|r| r.z1c).max().unwrap_or(0);
        let cols = records.iter().map(|r| r.z2c).max().unwrap_or(0);
        Self::new(rows, cols, records)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn records(&self) -> &[SurveyRecord] {
        &self.records
    }

    pub fn records_mut(&mut self) -> &mut [SurveyRecord] {
        &mut self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn respondents(&self) -> usize {
        self.records.iter().filter(|r| r.responded).count()
    }

    pub fn response_rate(&self) -> f64 {
        self.respondents() as f64 / self.records.len() as f64
    }

    /// Atomic-cell counts over all records, respondents or not.
    pub fn atomic_table(&self) -> Result<ContingencyTable> {
        ContingencyTable::cross_tabulate(
            self.rows,
            self.cols,
            self.records.iter().map(|r| (r.z1c - 1, r.z2c - 1)),
        )
    }

    /// Per-atomic-cell respondent statistics.
    pub fn cell_stats(&self) -> Result<CellStats> {
        CellStats::from_responses(
            self.rows,
            self.cols,
            self.records
                .iter()
                .filter_map(|r| r.observed().map(|y| (r.cell(), y))),
        )
    }

    pub fn respondent_mean(&self) -> Option<f64> {
        let (sum, n) = self
            .records
            .iter()
            .filter_map(SurveyRecord::observed)
            .fold((0.0, 0usize), |(s, n), y| (s + y, n + 1));
        (n > 0).then(|| sum / n as f64)
    }

    /// Mean of the full response, if every record carries `y`.
    pub fn true_mean(&self) -> Option<f64> {
        let ys: Option<Vec<f64>> = self.records.iter().map(|r| r.y).collect();
        let ys = ys?;
        (!ys.is_empty()).then(|| plain_mean(&ys))
    }
}

/// Left-to-right sum divided by the length.
pub(crate) fn plain_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

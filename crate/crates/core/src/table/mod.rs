//! Two-way contingency tables and the statistics computed on them.

mod altham;
mod chisq;
mod odds;
mod profile;

pub use altham::{altham_hack, altham_index, augmented_table, AlthamSummary};
pub use chisq::{chi_square_independence, chi_square_upper_tail, ChiSquare};
pub(crate) use odds::magnitude_order;
pub use odds::{enumerate_log_odds, sort_by_magnitude, OddsRatioRecord};
pub use profile::{central_peak_profile, BlockProfile, BlockStats};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Zero-based (row, column) position of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellIndex {
    pub row: usize,
    pub col: usize,
}

impl CellIndex {
    pub const fn new(row: usize, col: usize) -> Self {
        CellIndex { row, col }
    }
}

impl std::fmt::Display for CellIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// Label of an aggregation group. Always negative: the first cluster is -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct ClusterId(i32);

impl ClusterId {
    pub fn new(id: i32) -> Result<Self> {
        if id <= -1 {
            Ok(ClusterId(id))
        } else {
            Err(Error::InvalidClusterId(id))
        }
    }

    /// The id of the `ordinal`-th cluster (zero-based), i.e. `-(ordinal + 1)`.
    pub fn from_ordinal(ordinal: usize) -> Self {
        ClusterId(-(ordinal as i32) - 1)
    }

    pub fn get(self) -> i32 {
        self.0
    }

    pub fn ordinal(self) -> usize {
        (-self.0 - 1) as usize
    }
}

impl TryFrom<i32> for ClusterId {
    type Error = Error;
    fn try_from(v: i32) -> Result<Self> {
        ClusterId::new(v)
    }
}

impl From<ClusterId> for i32 {
    fn from(id: ClusterId) -> i32 {
        id.0
    }
}

impl std::fmt::Display for ClusterId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellState {
    /// A positive count still available for ratios and aggregation.
    Active(f64),
    /// A zero count. Never takes part in a ratio.
    Empty,
    /// Coloured with a cluster label; excluded from ratios and marginals.
    Assigned(ClusterId),
}

impl CellState {
    pub fn from_count(count: f64) -> Self {
        if count > 0.0 {
            CellState::Active(count)
        } else {
            CellState::Empty
        }
    }

    pub fn active_count(self) -> Option<f64> {
        match self {
            CellState::Active(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_active(self) -> bool {
        matches!(self, CellState::Active(_))
    }
}

/// An m x n grid of cell states stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    cells: Vec<CellState>,
}

impl ContingencyTable {
    /// Builds a table from row-major counts. Zero counts become
    /// [`CellState::Empty`]; negative or non-finite counts are rejected.
    pub fn from_counts(rows: usize, cols: usize, counts: &[f64]) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::TableTooSmall { rows, cols });
        }
        if counts.len() != rows * cols {
            return Err(Error::Malformed(format!(
                "expected {} counts for a {rows}x{cols} table, got {}",
                rows * cols,
                counts.len()
            )));
        }
        let mut cells = Vec::with_capacity(counts.len());
        for (idx, &value) in counts.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidCount {
                    row: idx / cols,
                    col: idx % cols,
                    value,
                });
            }
            cells.push(CellState::from_count(value));
        }
        Ok(ContingencyTable { rows, cols, cells })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NonRectangular {
                    row: i,
                    expected: n,
                    found: row.len(),
                });
            }
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_counts(m, n, &flat)
    }

    /// Cross-tabulates zero-based (row, col) labels into counts.
    pub fn cross_tabulate<I>(rows: usize, cols: usize, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut counts = vec![0.0; rows * cols];
        for (r, c) in labels {
            if r >= rows || c >= cols {
                return Err(Error::CellOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            counts[r * cols + c] += 1.0;
        }
        Self::from_counts(rows, cols, &counts)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn state(&self, cell: CellIndex) -> CellState {
        self.cells[cell.row * self.cols + cell.col]
    }

    /// The count of an active cell, `None` for empty or assigned cells.
    pub fn count(&self, cell: CellIndex) -> Option<f64> {
        self.state(cell).active_count()
    }

    pub fn set_state(&mut self, cell: CellIndex, state: CellState) {
        let idx = cell.row * self.cols + cell.col;
        self.cells[idx] = state;
    }

    pub fn contains(&self, cell: CellIndex) -> bool {
        cell.row < self.rows && cell.col < self.cols
    }

    /// All cell positions in row-major order.
    pub fn indices(&self) -> impl Iterator<Item = CellIndex> + '_ {
        let cols = self.cols;
        (0..self.cells.len()).map(move |i| CellIndex::new(i / cols, i % cols))
    }

    pub fn iter(&self) -> impl Iterator<Item = (CellIndex, CellState)> + '_ {
        self.indices().zip(self.cells.iter().copied())
    }

    pub fn active_cells(&self) -> impl Iterator<Item = (CellIndex, f64)> + '_ {
        self.iter()
            .filter_map(|(idx, s)| s.active_count().map(|c| (idx, c)))
    }

    pub fn active_count(&self) -> usize {
        self.cells.iter().filter(|s| s.is_active()).count()
    }

    /// Row totals over active cells.
    pub fn row_totals(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                self.cells[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .filter_map(|s| s.active_count())
                    .sum()
            })
            .collect()
    }

    /// Column totals over active cells.
    pub fn col_totals(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .filter_map(|i| self.cells[i * self.cols + j].active_count())
                    .sum()
            })
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().filter_map(|s| s.active_count()).sum()
    }

    /// Counts with non-active cells reported as zero, row-major.
    pub fn counts(&self) -> Vec<f64> {
        self.cells
            .iter()
            .map(|s| s.active_count().unwrap_or(0.0))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut cells = Vec::with_capacity(self.cells.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                cells.push(self.cells[i * self.cols + j]);
            }
        }
        ContingencyTable {
            rows: self.cols,
            cols: self.rows,
            cells,
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.cells.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.cells.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginals_exclude_assigned_cells() {
        let mut t =
            ContingencyTable::from_rows(&[vec![5.0, 3.0, 1.0], vec![2.0, 0.0, 4.0]]).unwrap();
        assert_eq!(t.state(CellIndex::new(1, 1)), CellState::Empty);
        t.set_state(
            CellIndex::new(0, 0),
            CellState::Assigned(ClusterId::from_ordinal(0)),
        );
        assert_eq!(t.row_totals(), vec![4.0, 6.0]);
        assert_eq!(t.col_totals(), vec![2.0, 3.0, 5.0]);
        assert_eq!(t.total(), 10.0);
        assert_eq!(t.active_count(), 4);
    }

    #[test]
    fn rejects_bad_shapes_and_counts() {
        assert!(matches!(
            ContingencyTable::from_rows(&[vec![1.0, 2.0], vec![3.0]]),
            Err(Error::NonRectangular { row: 1, .. })
        ));
        assert!(matches!(
            ContingencyTable::from_rows(&[vec![1.0, 2.0]]),
            Err(Error::TableTooSmall { .. })
        ));
        assert!(matches!(
            ContingencyTable::from_rows(&[vec![1.0, -2.0], vec![1.0, 1.0]]),
            Err(Error::InvalidCount { row: 0, col: 1, .. })
        ));
        assert!(ContingencyTable::from_rows(&[vec![1.0, f64::NAN], vec![1.0, 1.0]]).is_err());
    }

    #[test]
    fn cluster_ids_are_negative() {
        assert!(ClusterId::new(0).is_err());
        assert!(ClusterId::new(3).is_err());
        let id = ClusterId::new(-4).unwrap();
        assert_eq!(id.ordinal(), 3);
        assert_eq!(ClusterId::from_ordinal(3), id);
    }

    #[test]
    fn cross_tabulation_counts_labels() {
        let t = ContingencyTable::cross_tabulate(2, 2, [(0, 0), (0, 0), (1, 1), (0, 1)]).unwrap();
        assert_eq!(t.counts(), vec![2.0, 1.0, 0.0, 1.0]);
        assert!(ContingencyTable::cross_tabulate(2, 2, [(2, 0)]).is_err());
    }
}

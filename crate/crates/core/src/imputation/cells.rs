use serde::{Deserialize, Serialize};

use super::SurveyRecord;
use crate::engine::ClusterMap;
use crate::table::{CellState, ContingencyTable};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "cells")]
pub enum CellStructure {
    /// One cell for the whole dataset.
    Null,
    /// Every atomic cell on its own.
    Atomic,
    /// Clusters plus untouched atomic cells.
    Iloca,
    /// Cells cut at quantiles of the full response.
    Quantile(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Assignment {
    /// Imputation-cell id per atomic cell, row-major.
    ByAtomicCell { cols: usize, ids: Vec<usize> },
    /// Imputation-cell id per record.
    ByRecord(Vec<usize>),
}

/// A partition of records into imputation cells `0..n_cells`.
///
/// Atomic cells with a zero count map to the reserved id `n_cells`; no
/// record lands there when the structure was built from the dataset's own
/// table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImputationCells {
    pub kind: CellStructure,
    n_cells: usize,
    assignment: Assignment,
}

impl ImputationCells {
    pub fn null(rows: usize, cols: usize) -> Self {
        ImputationCells {
            kind: CellStructure::Null,
            n_cells: 1,
            assignment: Assignment::ByAtomicCell {
                cols,
                ids: vec![0; rows * cols],
            },
        }
    }

    pub fn atomic(table: &ContingencyTable) -> Self {
        let mut cells = Self::from_cluster_map(&ClusterMap::identity(table), table);
        cells.kind = CellStructure::Atomic;
        cells
    }

    /// One cell per cluster (in id order), then one per untouched positive
    /// cell in row-major order.
    pub fn from_cluster_map(map: &ClusterMap, table: &ContingencyTable) -> Self {
        let mut ids = vec![usize::MAX; table.len()];
        let cols = table.cols();
        let mut next = 0;
        for cluster in map.clusters() {
            for m in &cluster.members {
                ids[m.row * cols + m.col] = next;
            }
            next += 1;
        }
        for (idx, state) in table.iter() {
            let slot = &mut ids[idx.row * cols + idx.col];
            if *slot == usize::MAX && matches!(state, CellState::Active(_)) {
                *slot = next;
                next += 1;
            }
        }
        for slot in ids.iter_mut().filter(|s| **s == usize::MAX) {
            *slot = next;
        }
        ImputationCells {
            kind: CellStructure::Iloca,
            n_cells: next,
            assignment: Assignment::ByAtomicCell { cols, ids },
        }
    }

    pub(crate) fn by_record(kind: CellStructure, n_cells: usize, ids: Vec<usize>) -> Self {
        ImputationCells {
            kind,
            n_cells,
            assignment: Assignment::ByRecord(ids),
        }
    }

    /// Number of proper cells (the reserved empty-cell id excluded).
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn reserved_id(&self) -> usize {
        self.n_cells
    }

    /// Imputation cell of the `index`-th record.
    pub fn cell_of(&self, index: usize, record: &SurveyRecord) -> Result<usize> {
        match &self.assignment {
            Assignment::ByAtomicCell { cols, ids } => {
                let c = record.cell();
                if c.col >= *cols {
                    return Err(Error::InvalidDataset(format!(
                        "record {} falls outside the cell grid",
                        record.id
                    )));
                }
                ids.get(c.row * cols + c.col).copied().ok_or_else(|| {
                    Error::InvalidDataset(format!(
                        "record {} falls outside the cell grid",
                        record.id
                    ))
                })
            }
            Assignment::ByRecord(ids) => ids.get(index).copied().ok_or_else(|| {
                Error::InvalidDataset(format!("no cell assigned to record {}", record.id))
            }),
        }
    }

    /// Id per atomic cell, if the structure is defined on atomic cells.
    pub fn atomic_ids(&self) -> Option<&[usize]> {
        match &self.assignment {
            Assignment::ByAtomicCell { ids, .. } => Some(ids),
            Assignment::ByRecord(_) => None,
        }
    }
}

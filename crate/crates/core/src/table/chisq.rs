use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use super::{CellState, ContingencyTable};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquare {
    pub fn significant_at(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Upper-tail probability of a chi-square variate, `Q(dof/2, x/2)`.
pub fn chi_square_upper_tail(statistic: f64, dof: usize) -> f64 {
    if statistic <= 0.0 {
        return 1.0;
    }
    gamma_ur(dof as f64 / 2.0, statistic / 2.0)
}

/// Pearson test of row/column independence.
///
/// Assigned cells are left out of the marginals and the sum. Empty cells
/// stay in and contribute their expected count.
pub fn chi_square_independence(table: &ContingencyTable) -> Result<ChiSquare> {
    let rows = table.row_totals();
    let cols = table.col_totals();
    if let Some(i) = rows.iter().position(|&r| r <= 0.0) {
        return Err(Error::DegenerateMarginal(format!("row {i} total is zero")));
    }
    if let Some(j) = cols.iter().position(|&c| c <= 0.0) {
        return Err(Error::DegenerateMarginal(format!(
            "column {j} total is zero"
        )));
    }
    let total = table.total();

    let mut statistic = 0.0;
    for (idx, state) in table.iter() {
        let observed = match state {
            CellState::Active(c) => c,
            CellState::Empty => 0.0,
            CellState::Assigned(_) => continue,
        };
        let expected = rows[idx.row] * cols[idx.col] / total;
        statistic += (observed - expected).powi(2) / expected;
    }
    let dof = (table.rows() - 1) * (table.cols() - 1);
    Ok(ChiSquare {
        statistic,
        dof,
        p_value: chi_square_upper_tail(statistic, dof),
    })
}

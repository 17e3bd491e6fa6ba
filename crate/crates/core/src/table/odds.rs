use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{CellIndex, ContingencyTable};

/// One 2x2 sub-table with rows `i < k` and columns `j < l`.
///
/// `values` holds the four counts in the order `a_ij, a_kj, a_il, a_kl`;
/// [`OddsRatioRecord::cells`] returns the matching positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddsRatioRecord {
    pub i: usize,
    pub k: usize,
    pub j: usize,
    pub l: usize,
    pub values: [f64; 4],
    /// `(a_ij * a_kl) / (a_il * a_kj)`
    pub theta: f64,
    /// Natural log of `theta`.
    pub phi: f64,
    pub abs_phi: f64,
}

impl OddsRatioRecord {
    pub fn new(i: usize, k: usize, j: usize, l: usize, values: [f64; 4]) -> Self {
        let [a_ij, a_kj, a_il, a_kl] = values;
        let theta = (a_ij * a_kl) / (a_il * a_kj);
        let phi = theta.ln();
        OddsRatioRecord {
            i,
            k,
            j,
            l,
            values,
            theta,
            phi,
            abs_phi: phi.abs(),
        }
    }

    /// Cell positions in the same order as `values`.
    pub fn cells(&self) -> [CellIndex; 4] {
        [
            CellIndex::new(self.i, self.j),
            CellIndex::new(self.k, self.j),
            CellIndex::new(self.i, self.l),
            CellIndex::new(self.k, self.l),
        ]
    }

    pub fn key(&self) -> (usize, usize, usize, usize) {
        (self.i, self.k, self.j, self.l)
    }

    pub fn contains(&self, cell: CellIndex) -> bool {
        (cell.row == self.i || cell.row == self.k) && (cell.col == self.j || cell.col == self.l)
    }

    /// Position (0..4) of `cell` within `values`, if the ratio touches it.
    pub fn position_of(&self, cell: CellIndex) -> Option<usize> {
        self.cells().iter().position(|&c| c == cell)
    }

    /// Log-odds recomputed with the value at `position` replaced.
    pub fn phi_with(&self, position: usize, value: f64) -> f64 {
        let mut v = self.values;
        v[position] = value;
        ((v[0] * v[3]) / (v[2] * v[1])).ln()
    }
}

/// Every 2x2 sub-table whose four cells are active, in lexicographic
/// `(i, k, j, l)` order.
pub fn enumerate_log_odds(table: &ContingencyTable) -> Vec<OddsRatioRecord> {
    let (m, n) = (table.rows(), table.cols());
    let counts: Vec<Option<f64>> = table.iter().map(|(_, s)| s.active_count()).collect();
    let at = |r: usize, c: usize| counts[r * n + c];

    let mut out = Vec::new();
    for i in 0..m {
        for k in i + 1..m {
            for j in 0..n {
                let (Some(a_ij), Some(a_kj)) = (at(i, j), at(k, j)) else {
                    continue;
                };
                for l in j + 1..n {
                    if let (Some(a_il), Some(a_kl)) = (at(i, l), at(k, l)) {
                        out.push(OddsRatioRecord::new(i, k, j, l, [a_ij, a_kj, a_il, a_kl]));
                    }
                }
            }
        }
    }
    out
}

/// Ascending `|phi|`, ties broken by `(i, k, j, l)`.
pub fn sort_by_magnitude(records: &mut [OddsRatioRecord]) {
    records.sort_by(magnitude_order);
}

pub(crate) fn magnitude_order(a: &OddsRatioRecord, b: &OddsRatioRecord) -> Ordering {
    a.abs_phi
        .total_cmp(&b.abs_phi)
        .then_with(|| a.key().cmp(&b.key()))
}

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{enumerate_log_odds, ContingencyTable};

/// Summary of the log-odds ratios falling in one block class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockStats {
    pub count: usize,
    /// Sample variance of phi; `None` with fewer than two ratios.
    pub variance: Option<f64>,
    /// Share of ratios with `|phi| < threshold`; `None` when empty.
    pub near_zero: Option<f64>,
}

impl BlockStats {
    fn from_phis(phis: &[f64], threshold: f64) -> Self {
        let count = phis.len();
        let variance = (count >= 2).then(|| {
            let mean = phis.iter().sum::<f64>() / count as f64;
            phis.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (count - 1) as f64
        });
        let near_zero = (count > 0)
            .then(|| phis.iter().filter(|p| p.abs() < threshold).count() as f64 / count as f64);
        BlockStats {
            count,
            variance,
            near_zero,
        }
    }
}

/// Log-odds ratios split by whether both columns fall in the left block,
/// both in the right block, or one in each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockProfile {
    pub left_columns: Vec<usize>,
    pub threshold: f64,
    pub left: BlockStats,
    pub right: BlockStats,
    pub intersection: BlockStats,
}

impl BlockProfile {
    pub fn total(&self) -> usize {
        self.left.count + self.right.count + self.intersection.count
    }
}

/// Partitions the table's log-odds ratios by column block.
///
/// # Panics
///
/// If `left_columns` is empty, covers every column, or names a column
/// outside the table.
pub fn central_peak_profile(
    table: &ContingencyTable,
    left_columns: &[usize],
    threshold: f64,
) -> BlockProfile {
    let left: BTreeSet<usize> = left_columns.iter().copied().collect();
    assert!(
        !left.is_empty() && left.len() < table.cols(),
        "left block must be a non-empty proper subset of the columns"
    );
    assert!(
        left.iter().all(|&c| c < table.cols()),
        "left column out of range"
    );

    let (mut l, mut r, mut x) = (Vec::new(), Vec::new(), Vec::new());
    for rec in enumerate_log_odds(table) {
        match (left.contains(&rec.j), left.contains(&rec.l)) {
            (true, true) => l.push(rec.phi),
            (false, false) => r.push(rec.phi),
            _ => x.push(rec.phi),
        }
    }
    BlockProfile {
        left_columns: left.into_iter().collect(),
        threshold,
        left: BlockStats::from_phis(&l, threshold),
        right: BlockStats::from_phis(&r, threshold),
        intersection: BlockStats::from_phis(&x, threshold),
    }
}

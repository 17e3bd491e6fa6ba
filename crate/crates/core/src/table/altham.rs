use serde::{Deserialize, Serialize};

use super::{enumerate_log_odds, CellState, ContingencyTable, OddsRatioRecord};
use crate::engine::ClusterMap;

/// Sum of squared log-odds ratios, the independence variant of Altham's
/// index. Larger values mean more row/column dependence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlthamSummary {
    pub l: f64,
    pub n_phi: usize,
    pub mean_l: f64,
}

pub fn altham_index(records: &[OddsRatioRecord]) -> AlthamSummary {
    let l: f64 = records.iter().map(|r| r.phi * r.phi).sum();
    let n_phi = records.len();
    let mean_l = if n_phi == 0 { 0.0 } else { l / n_phi as f64 };
    AlthamSummary { l, n_phi, mean_l }
}

/// Copy of `original` in which every member of a cluster holds the mean of
/// the original counts of that cluster's members.
pub fn augmented_table(original: &ContingencyTable, clusters: &ClusterMap) -> ContingencyTable {
    let mut out = original.clone();
    for cluster in clusters.clusters() {
        let counts: Vec<f64> = cluster
            .members
            .iter()
            .map(|&c| original.count(c).unwrap_or(0.0))
            .collect();
        if counts.is_empty() {
            continue;
        }
        let mean = counts.iter().sum::<f64>() / counts.len() as f64;
        for &cell in &cluster.members {
            out.set_state(cell, CellState::from_count(mean));
        }
    }
    out
}

/// Altham index of the cluster-averaged table, which lets a clustered
/// table be compared against the original on the same m x n footing.
pub fn altham_hack(original: &ContingencyTable, clusters: &ClusterMap) -> AlthamSummary {
    if clusters.is_empty() {
        return altham_index(&enumerate_log_odds(original));
    }
    altham_index(&enumerate_log_odds(&augmented_table(original, clusters)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squares_the_single_log_odds() {
        let t = ContingencyTable::from_rows(&[vec![5.0, 3.0], vec![2.0, 4.0]]).unwrap();
        let s = altham_index(&enumerate_log_odds(&t));
        let expected = (10.0f64 / 3.0).ln().powi(2);
        assert!((s.l - expected).abs() < 1e-12);
        assert!((s.l - 1.4496).abs() < 1e-4);
        assert_eq!(s.n_phi, 1);
        assert_eq!(s.mean_l, s.l);
    }

    #[test]
    fn empty_records() {
        let s = altham_index(&[]);
        assert_eq!((s.l, s.n_phi, s.mean_l), (0.0, 0, 0.0));
    }
}

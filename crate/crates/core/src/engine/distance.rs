use serde::{Deserialize, Serialize};

use super::{CellStats, Mode};
use crate::table::{magnitude_order, CellIndex, OddsRatioRecord};
use crate::{Error, Result};

/// Picks the generator from ratios sorted by ascending `|phi|`.
///
/// Returns the position of the first ratio with at least one value below
/// `threshold` and, within it, the smallest such cell (ties by position).
/// `None` means no ratio qualifies.
pub fn select_generator(records: &[OddsRatioRecord], threshold: f64) -> Option<(usize, CellIndex)> {
    records.iter().enumerate().find_map(|(pos, rec)| {
        rec.cells()
            .into_iter()
            .zip(rec.values)
            .filter(|&(_, v)| v < threshold)
            .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)))
            .map(|(cell, _)| (pos, cell))
    })
}

/// Distance of one candidate ratio from the generator ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateDistance {
    pub record: OddsRatioRecord,
    /// Max positionwise count difference.
    pub delta_count: f64,
    /// Max positionwise respondent-mean difference (zero in frequency mode).
    pub delta_mean: f64,
    /// Max positionwise respondent-SD difference (zero in frequency mode).
    pub delta_sd: f64,
    /// Components min-max scaled over the pool; all zero in frequency mode.
    pub scaled: [f64; 3],
    /// The ranking distance: `delta_count` in frequency mode, the sum of
    /// the scaled components in imputation mode.
    pub delta: f64,
    /// The member whose count is closest to the generator cell's count.
    pub interchangeable: CellIndex,
}

/// The cell of `rec` whose value is closest to `target`, ties by position.
/// Cells listed in `exclude` are not considered.
pub fn closest_cell(
    rec: &OddsRatioRecord,
    target: f64,
    exclude: &[CellIndex],
) -> Option<CellIndex> {
    rec.cells()
        .into_iter()
        .zip(rec.values)
        .filter(|(c, _)| !exclude.contains(c))
        .min_by(|a, b| {
            (a.1 - target)
                .abs()
                .total_cmp(&(b.1 - target).abs())
                .then_with(|| a.0.cmp(&b.0))
        })
        .map(|(c, _)| c)
}

fn max_abs_diff(a: [f64; 4], b: [f64; 4]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn stat_values(
    stats: &CellStats,
    rec: &OddsRatioRecord,
    f: impl Fn(&CellStats, CellIndex) -> f64,
) -> [f64; 4] {
    rec.cells().map(|c| f(stats, c))
}

/// Min-max scales `values` to [0, 1]; a constant column scales to 0.
pub(crate) fn min_max_scale(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    values
        .iter()
        .map(|v| if range > 0.0 { (v - lo) / range } else { 0.0 })
        .collect()
}

/// Ranks the `k` smallest-`|phi|` ratios other than the generator by their
/// mini-max distance to the generator ratio.
///
/// `records` must already be sorted by ascending `|phi|`. The result is
/// ordered by ascending distance, then `|phi|`, then `(i, k, j, l)`.
pub fn candidate_distances(
    records: &[OddsRatioRecord],
    generator: &OddsRatioRecord,
    generator_cell: CellIndex,
    k: usize,
    mode: Mode,
    stats: Option<&CellStats>,
) -> Result<Vec<CandidateDistance>> {
    let stats = match mode {
        Mode::Frequency => None,
        Mode::Imputation => Some(stats.ok_or(Error::MissingStats)?),
    };
    let generator_value = generator
        .position_of(generator_cell)
        .map(|p| generator.values[p])
        .unwrap_or(f64::NAN);

    let pool: Vec<&OddsRatioRecord> = records
        .iter()
        .filter(|r| r.key() != generator.key())
        .take(k)
        .collect();

    let mut out: Vec<CandidateDistance> = pool
        .iter()
        .map(|rec| {
            let delta_count = max_abs_diff(rec.values, generator.values);
            let (delta_mean, delta_sd) = match stats {
                Some(s) => (
                    max_abs_diff(
                        stat_values(s, rec, CellStats::mean),
                        stat_values(s, generator, CellStats::mean),
                    ),
                    max_abs_diff(
                        stat_values(s, rec, CellStats::sd),
                        stat_values(s, generator, CellStats::sd),
                    ),
                ),
                None => (0.0, 0.0),
            };
            CandidateDistance {
                record: (*rec).clone(),
                delta_count,
                delta_mean,
                delta_sd,
                scaled: [0.0; 3],
                delta: delta_count,
                interchangeable: closest_cell(rec, generator_value, &[])
                    .expect("a ratio has four cells"),
            }
        })
        .collect();

    if stats.is_some() {
        apply_scaling(&mut out);
    }
    out.sort_by(|a, b| {
        a.delta
            .total_cmp(&b.delta)
            .then_with(|| magnitude_order(&a.record, &b.record))
    });
    Ok(out)
}

pub(crate) fn apply_scaling(cands: &mut [CandidateDistance]) {
    let a = min_max_scale(&cands.iter().map(|c| c.delta_count).collect::<Vec<_>>());
    let m = min_max_scale(&cands.iter().map(|c| c.delta_mean).collect::<Vec<_>>());
    let s = min_max_scale(&cands.iter().map(|c| c.delta_sd).collect::<Vec<_>>());
    for (i, c) in cands.iter_mut().enumerate() {
        c.scaled = [a[i], m[i], s[i]];
        c.delta = a[i] + m[i] + s[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(i: usize, k: usize, j: usize, l: usize, v: [f64; 4]) -> OddsRatioRecord {
        OddsRatioRecord::new(i, k, j, l, v)
    }

    #[test]
    fn generator_is_first_ratio_with_small_cell() {
        let mut recs = vec![
            rec(0, 1, 0, 1, [3.0, 4.0, 5.0, 6.0]),
            rec(0, 1, 1, 2, [3.0, 4.0, 5.0, 6.0]),
            rec(0, 2, 0, 1, [3.0, 4.0, 5.0, 6.0]),
        ];
        recs[0].abs_phi = 0.5;
        recs[1].abs_phi = 0.01;
        recs[2].abs_phi = 0.02;
        crate::table::sort_by_magnitude(&mut recs);
        let (pos, _) = select_generator(&recs, 20.0).unwrap();
        assert_eq!(recs[pos].abs_phi, 0.01);
    }

    #[test]
    fn generator_cell_is_the_unique_small_value() {
        let recs = vec![rec(0, 1, 0, 1, [30.0, 5.0, 25.0, 40.0])];
        assert_eq!(
            select_generator(&recs, 20.0),
            Some((0, CellIndex::new(1, 0)))
        );
    }

    #[test]
    fn ratios_without_small_cells_are_skipped() {
        let recs = vec![
            rec(0, 1, 0, 1, [30.0, 30.0, 30.0, 30.0]),
            rec(0, 2, 0, 1, [30.0, 12.0, 30.0, 12.0]),
        ];
        assert_eq!(
            select_generator(&recs, 20.0),
            Some((1, CellIndex::new(2, 0)))
        );
        assert_eq!(select_generator(&recs[..1], 20.0), None);
    }

    #[test]
    fn identical_candidate_ranks_first() {
        let g = rec(0, 1, 0, 1, [5.0, 3.0, 2.0, 4.0]);
        let records = vec![
            g.clone(),
            rec(2, 3, 0, 1, [6.0, 3.0, 2.0, 4.0]),
            rec(4, 5, 0, 1, [5.0, 3.0, 2.0, 4.0]),
        ];
        let c = candidate_distances(&records, &g, CellIndex::new(1, 0), 5, Mode::Frequency, None)
            .unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].record.key(), (4, 5, 0, 1));
        assert_eq!(c[0].delta, 0.0);
        assert_eq!(c[1].delta_count, 1.0);
    }

    #[test]
    fn constant_component_scales_to_zero() {
        assert_eq!(min_max_scale(&[2.0, 2.0, 2.0]), vec![0.0, 0.0, 0.0]);
        assert_eq!(min_max_scale(&[1.0, 3.0, 2.0]), vec![0.0, 1.0, 0.5]);
    }

    #[test]
    fn imputation_mode_needs_stats() {
        let g = rec(0, 1, 0, 1, [5.0, 3.0, 2.0, 4.0]);
        assert!(matches!(
            candidate_distances(&[], &g, CellIndex::new(0, 0), 2, Mode::Imputation, None),
            Err(Error::MissingStats)
        ));
    }
}

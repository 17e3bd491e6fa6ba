use super::{cell_mean_impute, CellStructure, EstimatorResult, ImputationCells, SurveyDataset};
use crate::{Error, Result};

/// Linear-interpolation quantile of sorted data at proportion `p`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Oracle cells cut at the `q / Q` quantiles (`q = 1..Q-1`) of the full
/// response. A value equal to a boundary goes to the lower cell.
pub fn quantile_cells(dataset: &SurveyDataset, q: usize) -> Result<ImputationCells> {
    if q < 1 || q > dataset.len() {
        return Err(Error::InvalidConfig(format!(
            "quantile count {q} outside 1..={}",
            dataset.len()
        )));
    }
    let ys: Vec<f64> = dataset
        .records()
        .iter()
        .map(|r| r.y)
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InvalidDataset("quantile cells need y for every record".into()))?;
    let mut sorted = ys.clone();
    sorted.sort_by(f64::total_cmp);
    let bounds: Vec<f64> = (1..q)
        .map(|k| quantile_sorted(&sorted, k as f64 / q as f64))
        .collect();
    let ids = ys
        .iter()
        .map(|&y| bounds.partition_point(|&b| b < y))
        .collect();
    Ok(ImputationCells::by_record(
        CellStructure::Quantile(q),
        q,
        ids,
    ))
}

pub fn quantile_cells_impute(dataset: &SurveyDataset, q: usize) -> Result<EstimatorResult> {
    cell_mean_impute(dataset, &quantile_cells(dataset, q)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imputation::SurveyRecord;

    fn data(ys: &[f64], responded: &[bool]) -> SurveyDataset {
        let recs = ys
            .iter()
            .zip(responded)
            .enumerate()
            .map(|(t, (&y, &r))| SurveyRecord {
                id: t.to_string(),
                y: Some(y),
                responded: r,
                z1: None,
                z2: None,
                z3: None,
                z1c: 1,
                z2c: 1,
            })
            .collect();
        SurveyDataset::new(1, 1, recs).unwrap()
    }

    #[test]
    fn interpolated_quantiles() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&s, 0.0), 1.0);
        assert_eq!(quantile_sorted(&s, 1.0), 4.0);
        assert_eq!(quantile_sorted(&s, 0.5), 2.5);
    }

    #[test]
    fn single_quantile_matches_null_cell() {
        let d = data(&[5.0, 1.0, 9.0, 3.0], &[true, false, true, false]);
        let q = quantile_cells_impute(&d, 1).unwrap();
        let n = cell_mean_impute(&d, &ImputationCells::null(1, 1)).unwrap();
        assert_eq!(q.w, n.w);
        assert_eq!(q.imputed_mean, n.imputed_mean);
    }

    #[test]
    fn ties_go_to_the_lower_cell() {
        let d = data(&[1.0, 2.0, 3.0, 4.0, 5.0], &[true; 5]);
        let cells = quantile_cells(&d, 2).unwrap();
        let ids: Vec<usize> = d
            .records()
            .iter()
            .enumerate()
            .map(|(t, r)| cells.cell_of(t, r).unwrap())
            .collect();
        assert_eq!(ids, vec![0, 0, 0, 1, 1]);
    }

    #[test]
    fn range_checked() {
        let d = data(&[1.0, 2.0], &[true, true]);
        assert!(quantile_cells(&d, 0).is_err());
        assert!(quantile_cells(&d, 3).is_err());
    }
}

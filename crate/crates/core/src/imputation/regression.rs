use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::dataset::plain_mean;
use super::{EstimatorResult, SurveyDataset, SurveyRecord};
use crate::{Error, Result};

/// Model form of the deterministic-regression baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegressionForm {
    /// `y` linear in its rank position. Respondents are fitted at
    /// mid-rank positions `(i - 0.5) / n_r`; non-respondents, in record
    /// order, are predicted at `(j - 0.5) / n_m`.
    RankLinear,
    /// `y` on `{1, z1, z2, z1^2}`, predicted from each record's own `z`.
    Quadratic,
}

/// Least-squares coefficients via SVD. Fails on a rank-deficient design.
pub fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let p = x.ncols();
    if x.nrows() < p {
        return Err(Error::SingularDesign(format!(
            "{} observations for {p} coefficients",
            x.nrows()
        )));
    }
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = smax * f64::EPSILON * x.nrows().max(p) as f64;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    if rank < p || smax == 0.0 {
        return Err(Error::SingularDesign(format!("design rank {rank} < {p}")));
    }
    svd.solve(y, tol)
        .map_err(|e| Error::SingularDesign(e.to_string()))
}

fn quadratic_row(rec: &SurveyRecord) -> Result<[f64; 4]> {
    let z1 = rec.z1.ok_or(Error::MissingCovariate("z1"))?;
    let z2 = rec.z2.ok_or(Error::MissingCovariate("z2"))?;
    Ok([1.0, z1, z2, z1 * z1])
}

/// Imputes every non-respondent with a fitted deterministic regression.
pub fn deterministic_regression_impute(
    dataset: &SurveyDataset,
    form: RegressionForm,
) -> Result<EstimatorResult> {
    let respondents: Vec<&SurveyRecord> =
        dataset.records().iter().filter(|r| r.responded).collect();
    if respondents.is_empty() {
        return Err(Error::NoRespondents);
    }
    if respondents.len() < 2 {
        return Err(Error::SingularDesign("fewer than two respondents".into()));
    }
    let n_m = dataset.len() - respondents.len();

    let predictions: Vec<f64> = match form {
        RegressionForm::RankLinear => {
            let mut ys: Vec<f64> = respondents.iter().filter_map(|r| r.y).collect();
            ys.sort_by(f64::total_cmp);
            let n_r = ys.len() as f64;
            let x = DMatrix::from_fn(ys.len(), 2, |i, j| {
                if j == 0 {
                    1.0
                } else {
                    (i as f64 + 0.5) / n_r
                }
            });
            let beta = least_squares(&x, &DVector::from_vec(ys))?;
            (0..n_m)
                .map(|j| beta[0] + beta[1] * (j as f64 + 0.5) / n_m as f64)
                .collect()
        }
        RegressionForm::Quadratic => {
            let rows: Vec<[f64; 4]> = respondents
                .iter()
                .map(|r| quadratic_row(r))
                .collect::<Result<_>>()?;
            let x = DMatrix::from_fn(rows.len(), 4, |i, j| rows[i][j]);
            let y =
                DVector::from_iterator(respondents.len(), respondents.iter().filter_map(|r| r.y));
            let beta = least_squares(&x, &y)?;
            dataset
                .records()
                .iter()
                .filter(|r| !r.responded)
                .map(|r| {
                    let row = quadratic_row(r)?;
                    Ok(row.iter().zip(beta.iter()).map(|(a, b)| a * b).sum())
                })
                .collect::<Result<_>>()?
        }
    };

    let mut next = predictions.iter();
    let w: Vec<f64> = dataset
        .records()
        .iter()
        .map(|r| match r.observed() {
            Some(y) => y,
            None => *next.next().expect("one prediction per non-respondent"),
        })
        .collect();
    let imputed_mean = plain_mean(&w);
    let n = dataset.len();
    Ok(EstimatorResult {
        cell_ids: vec![0; n],
        cell_means: vec![None],
        cell_sizes: vec![n],
        mixture_mean: imputed_mean,
        imputed_mean,
        actual_mean: dataset.true_mean(),
        w,
        fallback_cells: 0,
    })
}

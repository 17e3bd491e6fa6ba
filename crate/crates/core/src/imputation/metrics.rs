use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One replicate's imputed and actual overall means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicateMeans {
    pub imputed: f64,
    pub actual: f64,
}

fn denominator(reps: &[ReplicateMeans]) -> Result<f64> {
    if reps.is_empty() {
        return Err(Error::NoReplicates);
    }
    let d = reps.iter().map(|r| r.actual).sum::<f64>() / reps.len() as f64;
    if d == 0.0 || !d.is_finite() {
        return Err(Error::ZeroDenominator);
    }
    Ok(d)
}

/// Monte-Carlo percent relative bias of the imputed mean.
pub fn relative_bias(reps: &[ReplicateMeans]) -> Result<f64> {
    let d = denominator(reps)?;
    let k = reps.len() as f64;
    let diff: f64 = reps.iter().map(|r| r.imputed - r.actual).sum::<f64>() / k;
    Ok(100.0 * diff / d)
}

/// Monte-Carlo percent relative root mean square error.
pub fn rrmse(reps: &[ReplicateMeans]) -> Result<f64> {
    let d = denominator(reps)?;
    let k = reps.len() as f64;
    let mse: f64 = reps
        .iter()
        .map(|r| (r.imputed - r.actual).powi(2))
        .sum::<f64>()
        / k;
    Ok(100.0 * mse.sqrt() / d.abs())
}

/// RB and RRMSE of one estimator over a replicate set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub rb: f64,
    pub rrmse: f64,
}

impl Metric {
    pub fn from_replicates(reps: &[ReplicateMeans]) -> Result<Self> {
        Ok(Metric {
            rb: relative_bias(reps)?,
            rrmse: rrmse(reps)?,
        })
    }
}

/// Named metrics for every estimator in one simulation setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub setting: String,
    pub replicates: usize,
    /// Estimators in a fixed order, e.g. `iloca`, `null`, `atomic`,
    /// `regression`, `quantile_5`, ...
    pub estimators: Vec<(String, Metric)>,
    pub mean_iloca_cells: f64,
    pub mean_response_rate: f64,
}

impl MetricsReport {
    pub fn get(&self, name: &str) -> Option<Metric> {
        self.estimators
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| *m)
    }
}

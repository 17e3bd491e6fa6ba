use rand::Rng;
use serde::{Deserialize, Serialize};

use super::DgpKind;
use crate::imputation::{SurveyDataset, SurveyRecord};
use crate::{Error, Result};

/// Response mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseModel {
    /// Logistic in auxiliaries only (ignorable).
    Rm1,
    /// Logistic in `y` itself (non-ignorable).
    Rm2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseModelConfig {
    pub model: ResponseModel,
    /// `(lambda0, lambda1, lambda2)` of `logit p = l0 + l1 x1 + l2 x2`.
    pub lambda: [f64; 3],
    pub target_rate: f64,
    pub calibrate: bool,
}

/// Standard parameter settings per DGP, model and target rate (0.75 or
/// 0.50; anything else is rejected).
pub fn standard_lambda(dgp: DgpKind, model: ResponseModel, rate: f64) -> Result<[f64; 3]> {
    let high = if (rate - 0.75).abs() < 1e-9 {
        true
    } else if (rate - 0.50).abs() < 1e-9 {
        false
    } else {
        return Err(Error::InvalidConfig(format!(
            "no standard parameters for response rate {rate}"
        )));
    };
    Ok(match (dgp, model, high) {
        (DgpKind::Dgp1, ResponseModel::Rm1, true) => [0.05, 0.22, 0.05],
        (DgpKind::Dgp1, ResponseModel::Rm1, false) => [0.05, -0.05, 0.05],
        (DgpKind::Dgp1, ResponseModel::Rm2, true) => [0.05, 1.00, 0.30],
        (DgpKind::Dgp1, ResponseModel::Rm2, false) => [0.05, 1.00, -0.15],
        (DgpKind::Dgp2, ResponseModel::Rm1, true) => [1.00, 0.50, 0.10],
        (DgpKind::Dgp2, ResponseModel::Rm1, false) => [1.00, -12.0, -100.0],
        (DgpKind::Dgp2, ResponseModel::Rm2, true) => [0.10, 0.04, 0.05],
        (DgpKind::Dgp2, ResponseModel::Rm2, false) => [0.10, 0.08, -200.0],
    })
}

impl ResponseModelConfig {
    /// Standard parameters, calibration on for DGP2 and off for DGP1.
    pub fn standard(dgp: DgpKind, model: ResponseModel, rate: f64) -> Result<Self> {
        Ok(ResponseModelConfig {
            model,
            lambda: standard_lambda(dgp, model, rate)?,
            target_rate: rate,
            calibrate: dgp == DgpKind::Dgp2,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_rate > 0.0 && self.target_rate < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "target response rate {} outside (0, 1)",
                self.target_rate
            )));
        }
        if self.lambda.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidConfig(
                "response parameters must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Lower and upper clamp applied to response probabilities.
pub const P_CLAMP: f64 = 1e-12;

fn covariates(rec: &SurveyRecord, dgp: DgpKind, model: ResponseModel) -> Result<(f64, f64)> {
    use crate::Error::MissingCovariate;
    let z1 = || rec.z1.ok_or(MissingCovariate("z1"));
    let z2 = || rec.z2.ok_or(MissingCovariate("z2"));
    let z3 = || rec.z3.ok_or(MissingCovariate("z3"));
    let y = || rec.y.ok_or(MissingCovariate("y"));
    Ok(match (dgp, model) {
        (DgpKind::Dgp1, ResponseModel::Rm1) => (z1()?, z2()?),
        (DgpKind::Dgp2, ResponseModel::Rm1) => (z1()?, z3()?),
        (DgpKind::Dgp1, ResponseModel::Rm2) => (y()?, z2()?),
        (DgpKind::Dgp2, ResponseModel::Rm2) => (y()?, z3()?),
    })
}

fn logistic(x: f64) -> f64 {
    (1.0 / (1.0 + (-x).exp())).clamp(P_CLAMP, 1.0 - P_CLAMP)
}

/// Per-record response probabilities under `lambda`.
fn probabilities_with(xs: &[(f64, f64)], lambda: [f64; 3]) -> Vec<f64> {
    xs.iter()
        .map(|&(x1, x2)| logistic(lambda[0] + lambda[1] * x1 + lambda[2] * x2))
        .collect()
}

fn design(dataset: &SurveyDataset, dgp: DgpKind, model: ResponseModel) -> Result<Vec<(f64, f64)>> {
    dataset
        .records()
        .iter()
        .map(|r| covariates(r, dgp, model))
        .collect()
}

pub fn response_probabilities(
    dataset: &SurveyDataset,
    config: &ResponseModelConfig,
    dgp: DgpKind,
) -> Result<Vec<f64>> {
    Ok(probabilities_with(
        &design(dataset, dgp, config.model)?,
        config.lambda,
    ))
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Largest allowed gap between the calibrated mean probability and the
/// target rate.
pub const CALIBRATION_TOLERANCE: f64 = 0.005;

/// Shifts `lambda0` by bisection until the mean response probability is
/// within [`CALIBRATION_TOLERANCE`] of the target. Returns the adjusted
/// intercept and the mean probability it yields.
pub fn calibrate_intercept(
    dataset: &SurveyDataset,
    config: &ResponseModelConfig,
    dgp: DgpKind,
) -> Result<(f64, f64)> {
    config.validate()?;
    let xs = design(dataset, dgp, config.model)?;
    if xs.is_empty() {
        return Err(Error::InvalidDataset("no records to calibrate on".into()));
    }
    let target = config.target_rate;
    let rate = |l0: f64| {
        mean(&probabilities_with(
            &xs,
            [l0, config.lambda[1], config.lambda[2]],
        ))
    };

    let l0 = config.lambda[0];
    let r0 = rate(l0);
    if (r0 - target).abs() <= CALIBRATION_TOLERANCE {
        return Ok((l0, r0));
    }
    // Bracket the target; the mean probability rises with the intercept.
    let (mut lo, mut hi) = (l0, l0);
    let mut step = 1.0;
    if r0 < target {
        while rate(hi) < target {
            lo = hi;
            hi += step;
            step *= 2.0;
            if !hi.is_finite() {
                return Err(Error::DegenerateMarginal(
                    "cannot raise the response rate".into(),
                ));
            }
        }
    } else {
        while rate(lo) > target {
            hi = lo;
            lo -= step;
            step *= 2.0;
            if !lo.is_finite() {
                return Err(Error::DegenerateMarginal(
                    "cannot lower the response rate".into(),
                ));
            }
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let r = rate(mid);
        if (r - target).abs() <= CALIBRATION_TOLERANCE {
            return Ok((mid, r));
        }
        if r < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::DegenerateMarginal(format!(
        "no intercept brings the response rate within {CALIBRATION_TOLERANCE} of {target}"
    )))
}

/// One Bernoulli draw per probability, in order.
pub fn draw_response_indicators<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> Vec<bool> {
    p.iter().map(|&pi| rng.random::<f64>() < pi).collect()
}

/// Probabilities actually used for a dataset plus the intercept behind
/// them (calibrated when requested).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseDraw {
    pub lambda0: f64,
    pub mean_probability: f64,
    pub realized_rate: f64,
}

/// Computes probabilities (calibrating if configured), draws indicators
/// and writes them into `dataset`.
pub fn apply_response<R: Rng + ?Sized>(
    dataset: &mut SurveyDataset,
    config: &ResponseModelConfig,
    dgp: DgpKind,
    rng: &mut R,
) -> Result<ResponseDraw> {
    config.validate()?;
    let mut cfg = config.clone();
    if cfg.calibrate {
        cfg.lambda[0] = calibrate_intercept(dataset, config, dgp)?.0;
    }
    let p = response_probabilities(dataset, &cfg, dgp)?;
    let r = draw_response_indicators(&p, rng);
    for (rec, &ri) in dataset.records_mut().iter_mut().zip(&r) {
        rec.responded = ri;
    }
    Ok(ResponseDraw {
        lambda0: cfg.lambda[0],
        mean_probability: mean(&p),
        realized_rate: dataset.response_rate(),
    })
}

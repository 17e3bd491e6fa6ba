use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use super::kass::{cyclic_row, lognormal, lognormal_class, uniform_class};
use crate::imputation::{quantile_sorted, SurveyDataset, SurveyRecord};
use crate::table::ContingencyTable;
use crate::Result;

/// Data-generating process of an imputation setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DgpKind {
    /// Random classes; `y = u^(5/4)` with `z2` cut from the same `u`.
    Dgp1,
    /// Continuous auxiliaries; `y` quadratic in `z1`.
    Dgp2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpConfig {
    pub kind: DgpKind,
    /// Classes built from variables that do not drive `y` as intended.
    pub misspec: bool,
    pub n_obs: usize,
    pub rows: usize,
    pub cols: usize,
    /// `beta0..beta3` of the quadratic model.
    pub beta: [f64; 4],
    pub noise_variance: f64,
    pub exp_mean: f64,
    /// Cumulative class-break proportions, starting at 0 and ending at 1.
    pub class_breaks: Vec<f64>,
}

impl DgpConfig {
    pub fn dgp1(misspec: bool) -> Self {
        DgpConfig {
            kind: DgpKind::Dgp1,
            misspec,
            n_obs: 480,
            rows: 8,
            cols: 5,
            ..Self::dgp2(false)
        }
    }

    pub fn dgp2(misspec: bool) -> Self {
        DgpConfig {
            kind: DgpKind::Dgp2,
            misspec,
            n_obs: 480,
            rows: 5,
            cols: 5,
            beta: [20.0, 10.0, 0.5, 10.0],
            noise_variance: 200.0,
            exp_mean: 100.0,
            class_breaks: vec![0.0, 0.04, 0.10, 0.15, 0.20, 1.0],
        }
    }

    pub fn new(kind: DgpKind, misspec: bool) -> Self {
        match kind {
            DgpKind::Dgp1 => Self::dgp1(misspec),
            DgpKind::Dgp2 => Self::dgp2(misspec),
        }
    }

    pub fn validate(&self) -> Result<()> {
        use crate::Error::InvalidConfig;
        if self.rows < 2 || self.cols < 2 {
            return Err(crate::Error::TableTooSmall {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let b = &self.class_breaks;
        if b.first() != Some(&0.0) || b.last() != Some(&1.0) || b.windows(2).any(|w| w[0] >= w[1]) {
            return Err(InvalidConfig(
                "class breaks must rise strictly from 0 to 1".into(),
            ));
        }
        if self.kind == DgpKind::Dgp2 && (b.len() != self.rows + 1 || b.len() != self.cols + 1) {
            return Err(InvalidConfig(format!(
                "{} class breaks do not fit a {}x{} table",
                b.len(),
                self.rows,
                self.cols
            )));
        }
        if self.n_obs < 2 {
            return Err(InvalidConfig("at least two records are needed".into()));
        }
        if self.noise_variance.is_nan()
            || self.noise_variance < 0.0
            || self.exp_mean.is_nan()
            || self.exp_mean <= 0.0
        {
            return Err(InvalidConfig(
                "noise variance and exponential mean must be positive".into(),
            ));
        }
        Ok(())
    }

    /// The quadratic mean function without noise.
    pub fn dgp2_mean(&self, z1: f64, z2: f64) -> f64 {
        let [b0, b1, b2, b3] = self.beta;
        b0 + b1 * z1 + b2 * z2 + b3 * z1 * z1
    }
}

/// One simulated dataset, response indicators not yet drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateOutput {
    pub dataset: SurveyDataset,
    pub table: ContingencyTable,
    pub true_mean: f64,
    pub response_rate: f64,
}

impl ReplicateOutput {
    pub(crate) fn from_dataset(dataset: SurveyDataset) -> Result<Self> {
        let table = dataset.atomic_table()?;
        let true_mean = dataset.true_mean().unwrap_or(f64::NAN);
        let response_rate = dataset.response_rate();
        Ok(ReplicateOutput {
            dataset,
            table,
            true_mean,
            response_rate,
        })
    }
}

pub fn dgp1_response(u: f64) -> f64 {
    u.powf(1.25)
}

/// Draws a DGP1 dataset: per record `u`, then (misspecified only) an
/// independent lognormal draw for the column class.
///
/// `z2` always holds the uniform-derived class that drives `y` and the
/// response model; misspecification only replaces the classification
/// label `z2c`.
pub fn gen_dgp1<R: Rng + ?Sized>(config: &DgpConfig, rng: &mut R) -> Result<SurveyDataset> {
    config.validate()?;
    let ln = lognormal();
    let (m, n) = (config.rows, config.cols);
    let records = (1..=config.n_obs)
        .map(|t| {
            let u: f64 = rng.random();
            let z2 = uniform_class(u, n);
            let z2c = if config.misspec {
                lognormal_class(ln.sample(rng), n)
            } else {
                z2
            };
            let z1c = cyclic_row(t, m);
            SurveyRecord {
                id: t.to_string(),
                y: Some(dgp1_response(u)),
                responded: true,
                z1: Some(z1c as f64),
                z2: Some(z2 as f64),
                z3: None,
                z1c,
                z2c,
            }
        })
        .collect();
    SurveyDataset::new(m, n, records)
}

/// One-based class of each value under empirical quantile breaks.
/// Values equal to a break fall in the lower class.
pub fn empirical_classes(values: &[f64], breaks: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let cuts: Vec<f64> = breaks[1..breaks.len() - 1]
        .iter()
        .map(|&p| quantile_sorted(&sorted, p))
        .collect();
    values
        .iter()
        .map(|&v| 1 + cuts.partition_point(|&c| c < v))
        .collect()
}

/// Draws a DGP2 dataset: per record `z1, z2, z3`, then the noise term.
/// Classes are cut at the replicate's own empirical quantiles of
/// `z1 + z1^2` (plain `z1` when misspecified) and `z2`.
pub fn gen_dgp2<R: Rng + ?Sized>(config: &DgpConfig, rng: &mut R) -> Result<SurveyDataset> {
    config.validate()?;
    let exp =
        Exp::new(1.0 / config.exp_mean).map_err(|e| crate::Error::InvalidConfig(e.to_string()))?;
    let noise = Normal::new(0.0, config.noise_variance.sqrt())
        .map_err(|e| crate::Error::InvalidConfig(e.to_string()))?;
    let draws: Vec<[f64; 4]> = (0..config.n_obs)
        .map(|_| {
            let z1 = exp.sample(rng);
            let z2 = exp.sample(rng);
            let z3 = exp.sample(rng);
            let eps = noise.sample(rng);
            [z1, z2, z3, eps]
        })
        .collect();
    let z1_star: Vec<f64> = draws
        .iter()
        .map(|d| {
            if config.misspec {
                d[0]
            } else {
                d[0] + d[0] * d[0]
            }
        })
        .collect();
    let z2: Vec<f64> = draws.iter().map(|d| d[1]).collect();
    let c1 = empirical_classes(&z1_star, &config.class_breaks);
    let c2 = empirical_classes(&z2, &config.class_breaks);
    let records = draws
        .iter()
        .enumerate()
        .map(|(t, &[z1, z2, z3, eps])| SurveyRecord {
            id: (t + 1).to_string(),
            y: Some(config.dgp2_mean(z1, z2) + eps),
            responded: true,
            z1: Some(z1),
            z2: Some(z2),
            z3: Some(z3),
            z1c: c1[t],
            z2c: c2[t],
        })
        .collect();
    SurveyDataset::new(config.rows, config.cols, records)
}

pub fn gen_dataset<R: Rng + ?Sized>(config: &DgpConfig, rng: &mut R) -> Result<SurveyDataset> {
    match config.kind {
        DgpKind::Dgp1 => gen_dgp1(config, rng),
        DgpKind::Dgp2 => gen_dgp2(config, rng),
    }
}

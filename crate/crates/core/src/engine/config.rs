use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Distances use cell counts only.
    Frequency,
    /// Distances add scaled differences of respondent means and SDs.
    Imputation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IlocaConfig {
    /// Minimum aggregated cell size `M0`.
    pub min_cell_size: f64,
    pub max_steps: usize,
    /// Fraction of the smallest-|phi| ratios eligible as candidates.
    pub k_proportion: f64,
    pub mode: Mode,
    /// Inflate the threshold as active cells deplete.
    pub relaxation: bool,
}

impl Default for IlocaConfig {
    fn default() -> Self {
        IlocaConfig {
            min_cell_size: 20.0,
            max_steps: 20,
            k_proportion: 0.05,
            mode: Mode::Frequency,
            relaxation: true,
        }
    }
}

impl IlocaConfig {
    pub fn imputation() -> Self {
        IlocaConfig {
            mode: Mode::Imputation,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min_cell_size.is_finite() && self.min_cell_size > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "min cell size must be positive, got {}",
                self.min_cell_size
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max steps must be at least 1".into()));
        }
        if !(self.k_proportion > 0.0 && self.k_proportion <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "k-proportion must lie in (0, 1], got {}",
                self.k_proportion
            )));
        }
        Ok(())
    }

    /// Size threshold in force at outer step `step`.
    pub fn step_threshold(&self, rows: usize, cols: usize, active: usize, step: usize) -> f64 {
        if self.relaxation {
            relax_threshold(self.min_cell_size, rows, cols, active, step)
        } else {
            self.min_cell_size
        }
    }

    /// Candidate pool size for `n_ratios` ratios: `max(2, ceil(p * n))`.
    pub fn pool_size(&self, n_ratios: usize) -> usize {
        let k = (self.k_proportion * n_ratios as f64).ceil() as usize;
        k.max(2)
    }
}

/// `M0 * (m * n) / (active + 1 + steps)`, always computed from the
/// original `M0` so that successive steps do not compound.
pub fn relax_threshold(m0: f64, rows: usize, cols: usize, active: usize, steps: usize) -> f64 {
    m0 * (rows * cols) as f64 / (active + 1 + steps) as f64
}

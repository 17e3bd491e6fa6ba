use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::table::ContingencyTable;
use crate::{Error, Result};

/// How the column variable of a synthetic table is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnLaw {
    /// `z2 = int(1 + n u)`, `u ~ U(0, 1)`.
    Uniform,
    /// `z2 = int((1 + u) mod n)`, `u ~ lognormal(0, 2)`, with 0 wrapped to `n`.
    Lognormal,
}

/// One synthetic two-way table and the labels behind it (one-based).
#[derive(Debug, Clone, PartialEq)]
pub struct KassTable {
    pub z1: Vec<usize>,
    pub z2: Vec<usize>,
    pub table: ContingencyTable,
}

/// Cyclic row label of the `t`-th record (`t` one-based).
pub fn cyclic_row(t: usize, m: usize) -> usize {
    match t % m {
        0 => m,
        i => i,
    }
}

pub fn uniform_class(u: f64, n: usize) -> usize {
    ((1.0 + n as f64 * u) as usize).min(n)
}

pub fn lognormal_class(u: f64, n: usize) -> usize {
    match ((1.0 + u) % n as f64) as usize {
        0 => n,
        c => c,
    }
}

pub(crate) fn lognormal() -> LogNormal<f64> {
    LogNormal::new(0.0, 2.0).expect("valid lognormal parameters")
}

/// Generates `n_obs` records with a cyclic row variable and a random
/// column variable, one draw per record in record order.
pub fn gen_kass_table<R: Rng + ?Sized>(
    n_obs: usize,
    m: usize,
    n: usize,
    law: ColumnLaw,
    rng: &mut R,
) -> Result<KassTable> {
    if m < 2 || n < 2 {
        return Err(Error::TableTooSmall { rows: m, cols: n });
    }
    if n_obs < m * n {
        return Err(Error::InvalidConfig(format!(
            "{n_obs} records cannot fill a {m}x{n} table"
        )));
    }
    let ln = lognormal();
    let z1: Vec<usize> = (1..=n_obs).map(|t| cyclic_row(t, m)).collect();
    let z2: Vec<usize> = (0..n_obs)
        .map(|_| match law {
            ColumnLaw::Uniform => uniform_class(rng.random::<f64>(), n),
            ColumnLaw::Lognormal => lognormal_class(ln.sample(rng), n),
        })
        .collect();
    let table =
        ContingencyTable::cross_tabulate(m, n, z1.iter().zip(&z2).map(|(&a, &b)| (a - 1, b - 1)))?;
    Ok(KassTable { z1, z2, table })
}

/// A table with a wide block of low-count columns on the left and a
/// narrow block of high-count columns on the right.
///
/// Rows are cyclic as in [`gen_kass_table`]; each record's column is drawn
/// with weight 1 for the `n_left` left columns and `ratio` for the
/// `n_right` right columns.
pub fn gen_blocked_table<R: Rng + ?Sized>(
    n_obs: usize,
    m: usize,
    n_left: usize,
    n_right: usize,
    ratio: f64,
    rng: &mut R,
) -> Result<ContingencyTable> {
    let n = n_left + n_right;
    if m < 2 || n_left < 1 || n_right < 1 {
        return Err(Error::TableTooSmall { rows: m, cols: n });
    }
    if ratio.is_nan() || ratio <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "block ratio {ratio} must be positive"
        )));
    }
    let weights: Vec<f64> = (0..n)
        .map(|j| if j < n_left { 1.0 } else { ratio })
        .collect();
    let total: f64 = weights.iter().sum();
    let labels: Vec<(usize, usize)> = (1..=n_obs)
        .map(|t| {
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let col = weights
                .iter()
                .position(|w| {
                    acc += w;
                    u < acc
                })
                .unwrap_or(n - 1);
            (cyclic_row(t, m) - 1, col)
        })
        .collect();
    ContingencyTable::cross_tabulate(m, n, labels)
}

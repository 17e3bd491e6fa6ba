//! Clustering of contingency-table cells into imputation groups using
//! near-independent log-odds ratios, with cell-mean imputation and the
//! simulation harnesses used to evaluate it.
//!
//! The crate is organised bottom-up:
//!
//! * [`table`] holds the contingency table, log-odds enumeration, the
//!   Pearson independence test and the Altham-style dependence index.
//! * [`engine`] is the aggregation algorithm itself ([`engine::run_iloca`]).
//! * [`imputation`] turns a cluster map into imputation cells and computes
//!   imputed means, baselines and Monte-Carlo error metrics.
//! * [`simgen`] generates the seeded tables and survey datasets for the
//!   clustering and imputation studies.
//! * [`report`] holds file formats and the command drivers behind the CLI.
//!
//! ```
//! use iloca::table::{ContingencyTable, enumerate_log_odds};
//!
//! let table = ContingencyTable::from_rows(&[vec![5.0, 3.0], vec![2.0, 4.0]]).unwrap();
//! let ratios = enumerate_log_odds(&table);
//! assert_eq!(ratios.len(), 1);
//! assert!((ratios[0].theta - 10.0 / 3.0).abs() < 1e-12);
//! ```

pub mod engine;
pub mod error;
pub mod imputation;
pub mod report;
pub mod simgen;
pub mod table;

pub use error::{Error, Result};

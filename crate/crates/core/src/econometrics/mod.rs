//! Deterministic statistics engine: OLS with classical inference, partial
//! autocorrelation, the augmented Dickey-Fuller unit-root test,
//! variance-inflation factors, and the log-volume autoregression with
//! pricing-error shocks.

mod adf;
mod noise_model;
mod ols;
mod pacf;

pub use adf::{adf_test, AdfResult, PBound};
pub use noise_model::{fit_noise_model, AnalysisRow, AnalysisTable, ErrorColumns};
pub use ols::{ols_fit, vif, RegressionResult};
pub use pacf::{pacf, select_ar_order, PacfResult};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EconError {
    #[error("design is rank deficient; dependent column index(es): {columns:?}")]
    Collinear { columns: Vec<usize> },
    #[error("series too short: need more than {needed}, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("empty input")]
    Empty,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("need at least {needed} regressors, got {got}")]
    TooFewColumns { needed: usize, got: usize },
    #[error("system is underdetermined: {rows} rows for {cols} columns")]
    Underdetermined { rows: usize, cols: usize },
    #[error("regressor {column} is perfectly explained by the others (infinite VIF)")]
    InfiniteVif { column: usize },
    #[error("volume must be >= 1 for the log transform (row {row})")]
    NonPositiveVolume { row: usize },
}

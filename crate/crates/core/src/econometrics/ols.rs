//! Ordinary least squares with classical (homoskedastic) inference.
//!
//! The solve goes through a Householder QR factorization rather than the
//! normal equations; designs here can be hundreds of thousands of rows
//! with highly correlated columns, and the QR route keeps the conditioning
//! of X rather than X'X. The integration suite cross-checks the
//! coefficients against an explicit normal-equations solve.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::EconError;

/// Relative pivot threshold below which a QR diagonal marks a dependent
/// column.
const RANK_TOL: f64 = 1e-10;

/// Full OLS output for one fitted specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegressionResult {
    /// One label per design column, in design order.
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    /// `t = coefficient / standard error`, per regressor.
    pub t_statistics: Vec<f64>,
    /// Two-sided p-values from the Student-t with `residual_df` degrees of
    /// freedom.
    pub p_values: Vec<f64>,
    pub r_squared: f64,
    pub adjusted_r_squared: f64,
    /// Overall F statistic with `f_df = (k - 1, n - k)`, intercept models.
    pub f_statistic: f64,
    pub f_df: (usize, usize),
    pub residual_std_error: f64,
    pub residual_df: usize,
    pub n_observations: usize,
    /// Coefficient covariance matrix `sigma^2 (X'X)^{-1}`, k x k.
    pub covariance: Vec<Vec<f64>>,
}

impl RegressionResult {
    /// Index of a regressor by its label.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Coefficient of a regressor by its label.
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.index_of(name).map(|i| self.coefficients[i])
    }
}

fn validate_design(design: &[Vec<f64>], response: &[f64]) -> Result<(usize, usize), EconError> {
    let cols = design.len();
    if cols == 0 {
        return Err(EconError::Empty);
    }
    let rows = design[0].len();
    if rows == 0 || response.is_empty() {
        return Err(EconError::Empty);
    }
    if response.len() != rows || design.iter().any(|c| c.len() != rows) {
        return Err(EconError::Underdetermined { rows, cols });
    }
    if rows < cols {
        return Err(EconError::Underdetermined { rows, cols });
    }
    if design.iter().flatten().any(|v| !v.is_finite()) || response.iter().any(|v| !v.is_finite()) {
        return Err(EconError::NonFinite);
    }
    Ok((rows, cols))
}

/// Fit `response` on the design columns (the first column is normally the
/// intercept) by least squares.
///
/// Rank-deficient designs produce [`EconError::Collinear`] naming the
/// dependent column indexes.
pub fn ols_fit(
    design: &[Vec<f64>],
    names: &[String],
    response: &[f64],
) -> Result<RegressionResult, EconError> {
    let (n, k) = validate_design(design, response)?;
    assert_eq!(names.len(), k, "one name per design column");

    let x = DMatrix::from_fn(n, k, |i, j| design[j][i]);
    let y = DVector::from_column_slice(response);

    let qr = x.clone().qr();
    let r = qr.r();
    let max_diag = (0..k).map(|j| r[(j, j)].abs()).fold(0.0f64, f64::max);
    let dependent: Vec<usize> = (0..k)
        .filter(|&j| r[(j, j)].abs() <= RANK_TOL * max_diag)
        .collect();
    if !dependent.is_empty() {
        return Err(EconError::Collinear { columns: dependent });
    }

    let qty = qr.q().transpose() * &y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or(EconError::Collinear { columns: vec![] })?;

    let fitted = &x * &beta;
    let residuals = &y - &fitted;
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let mean_y = response.iter().sum::<f64>() / n as f64;
    let tss: f64 = response.iter().map(|v| (v - mean_y) * (v - mean_y)).sum();

    let residual_df = n - k;
    let sigma_sq = if residual_df > 0 { rss / residual_df as f64 } else { 0.0 };

    // (X'X)^{-1} = R^{-1} R^{-T}.
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or(EconError::Collinear { columns: vec![] })?;
    let xtx_inv = &r_inv * r_inv.transpose();

    let covariance: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| sigma_sq * xtx_inv[(i, j)]).collect())
        .collect();
    let standard_errors: Vec<f64> = (0..k).map(|j| covariance[j][j].sqrt()).collect();
    let coefficients: Vec<f64> = beta.iter().copied().collect();
    let t_statistics: Vec<f64> = coefficients
        .iter()
        .zip(&standard_errors)
        .map(|(b, se)| if *se > 0.0 { b / se } else { f64::INFINITY.copysign(*b) })
        .collect();
    let p_values: Vec<f64> = t_statistics
        .iter()
        .map(|&t| two_sided_p(t, residual_df as f64))
        .collect();

    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 0.0 };
    let adjusted_r_squared = if residual_df > 0 && tss > 0.0 {
        1.0 - (1.0 - r_squared) * (n as f64 - 1.0) / residual_df as f64
    } else {
        r_squared
    };
    let (f_statistic, f_df) = if k > 1 && residual_df > 0 && (1.0 - r_squared) > 0.0 {
        let df1 = k - 1;
        let f = (r_squared / df1 as f64) / ((1.0 - r_squared) / residual_df as f64);
        (f, (df1, residual_df))
    } else {
        (f64::INFINITY, (k.saturating_sub(1), residual_df))
    };

    Ok(RegressionResult {
        names: names.to_vec(),
        coefficients,
        standard_errors,
        t_statistics,
        p_values,
        r_squared,
        adjusted_r_squared,
        f_statistic,
        f_df,
        residual_std_error: sigma_sq.sqrt(),
        residual_df,
        n_observations: n,
        covariance,
    })
}

fn two_sided_p(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    2.0 * dist.cdf(-t.abs())
}

/// Variance-inflation factor per regressor: `1 / (1 - R_j^2)` from
/// regressing column `j` on the remaining columns plus an intercept.
///
/// Input columns exclude the intercept. Perfect collinearity yields
/// [`EconError::InfiniteVif`].
pub fn vif(design: &[Vec<f64>]) -> Result<Vec<f64>, EconError> {
    if design.len() < 2 {
        return Err(EconError::TooFewColumns { needed: 2, got: design.len() });
    }
    let n = design[0].len();
    let mut out = Vec::with_capacity(design.len());
    for j in 0..design.len() {
        let mut columns: Vec<Vec<f64>> = Vec::with_capacity(design.len());
        let mut names: Vec<String> = Vec::with_capacity(design.len());
        columns.push(vec![1.0; n]);
        names.push("intercept".to_string());
        for (i, col) in design.iter().enumerate() {
            if i != j {
                columns.push(col.clone());
                names.push(format!("x{i}"));
            }
        }
        let fit = ols_fit(&columns, &names, &design[j]).map_err(|e| match e {
            EconError::Collinear { .. } => EconError::InfiniteVif { column: j },
            other => other,
        })?;
        let denom = 1.0 - fit.r_squared;
        if denom <= 1e-12 {
            return Err(EconError::InfiniteVif { column: j });
        }
        out.push(1.0 / denom);
    }
    Ok(out)
}

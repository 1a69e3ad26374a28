//! Augmented Dickey-Fuller unit-root test.
//!
//! Fits `dV_t = a0 + beta V_{t-1} [+ delta t] + sum_i a_i dV_{t-i} + u_t`
//! and reports the t-ratio on `beta`. The null is a unit root (beta = 0,
//! the series is a random walk); the alternative is beta < 0
//! (stationarity), so rejection happens in the left tail.
//!
//! Decisions use tabulated finite-sample critical values for the
//! constant-only and constant-plus-trend specifications, interpolated
//! linearly in the effective sample size. P-values are reported as a
//! bracket: a floor of 0.01 beyond the 1% point, a ceiling of 0.10 inside
//! the band, and a linear interpolation between the tabulated points
//! otherwise.

use serde::{Deserialize, Serialize};

use super::ols::ols_fit;
use super::EconError;

/// Critical-value rows: (sample size, 1%, 5%, 10%).
const CONSTANT_ONLY: [(f64, [f64; 3]); 6] = [
    (25.0, [-3.75, -3.00, -2.63]),
    (50.0, [-3.58, -2.93, -2.60]),
    (100.0, [-3.51, -2.89, -2.58]),
    (250.0, [-3.46, -2.88, -2.57]),
    (500.0, [-3.44, -2.87, -2.57]),
    (f64::INFINITY, [-3.43, -2.86, -2.57]),
];

const CONSTANT_AND_TREND: [(f64, [f64; 3]); 6] = [
    (25.0, [-4.38, -3.60, -3.24]),
    (50.0, [-4.15, -3.50, -3.18]),
    (100.0, [-4.04, -3.45, -3.15]),
    (250.0, [-3.99, -3.43, -3.13]),
    (500.0, [-3.98, -3.42, -3.13]),
    (f64::INFINITY, [-3.96, -3.41, -3.12]),
];

/// P-value bracket relative to the tabulated 1%/5%/10% points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "p")]
pub enum PBound {
    /// Statistic beyond the 1% point: p <= 0.01 (a floor, not an exact p).
    Floor,
    /// Linear interpolation between tabulated points.
    Value(f64),
    /// Statistic inside the 10% point: p >= 0.10.
    Ceiling,
}

impl std::fmt::Display for PBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PBound::Floor => write!(f, "p <= 0.01"),
            PBound::Value(p) => write!(f, "p = {p:.4}"),
            PBound::Ceiling => write!(f, "p >= 0.10"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdfResult {
    /// t-ratio on the lagged-level coefficient.
    pub statistic: f64,
    pub lag_order: usize,
    pub includes_trend: bool,
    pub p_bound: PBound,
    pub reject_unit_root_at_5pct: bool,
    /// Rows entering the test regression.
    pub effective_n: usize,
}

fn critical_values(table: &[(f64, [f64; 3])], n: f64) -> [f64; 3] {
    if n <= table[0].0 {
        return table[0].1;
    }
    for pair in table.windows(2) {
        let (lo_n, lo_cv) = pair[0];
        let (hi_n, hi_cv) = pair[1];
        if n <= hi_n {
            // The last segment reaches the asymptotic row; interpolate in
            // 1/n there so the values converge instead of plateauing.
            let w = if hi_n.is_infinite() {
                1.0 - lo_n / n
            } else {
                (n - lo_n) / (hi_n - lo_n)
            };
            return [
                lo_cv[0] + w * (hi_cv[0] - lo_cv[0]),
                lo_cv[1] + w * (hi_cv[1] - lo_cv[1]),
                lo_cv[2] + w * (hi_cv[2] - lo_cv[2]),
            ];
        }
    }
    table[table.len() - 1].1
}

fn p_bound(statistic: f64, cv: &[f64; 3]) -> PBound {
    let [cv1, cv5, cv10] = *cv;
    if statistic <= cv1 {
        PBound::Floor
    } else if statistic >= cv10 {
        PBound::Ceiling
    } else if statistic <= cv5 {
        PBound::Value(0.01 + (statistic - cv1) / (cv5 - cv1) * 0.04)
    } else {
        PBound::Value(0.05 + (statistic - cv5) / (cv10 - cv5) * 0.05)
    }
}

/// Run the test on a level series with `lag_order` difference lags.
///
/// `include_trend` adds the linear drift regressor; the constant-only form
/// is the usual choice for a series that varies around a fixed mean.
pub fn adf_test(
    series: &[f64],
    lag_order: usize,
    include_trend: bool,
) -> Result<AdfResult, EconError> {
    let n = series.len();
    if n <= lag_order + 2 {
        return Err(EconError::TooShort { needed: lag_order + 2, got: n });
    }
    let diffs: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();

    // Rows t = lag_order + 1 .. n-1 (0-based on the level series).
    let rows = n - 1 - lag_order;
    let k = 2 + lag_order + usize::from(include_trend);
    if rows <= k {
        return Err(EconError::TooShort { needed: k + lag_order + 1, got: n });
    }

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut names: Vec<String> = Vec::with_capacity(k);
    columns.push(vec![1.0; rows]);
    names.push("Constant".to_string());
    columns.push(series[lag_order..n - 1].to_vec());
    names.push("Level lag".to_string());
    if include_trend {
        columns.push((0..rows).map(|i| (i + 1) as f64).collect());
        names.push("Trend".to_string());
    }
    for lag in 1..=lag_order {
        // dV_{t-lag} for t in (lag_order+1)..n.
        columns.push(diffs[lag_order - lag..diffs.len() - lag].to_vec());
        names.push(format!("Diff lag {lag}"));
    }
    let response: Vec<f64> = diffs[lag_order..].to_vec();

    let fit = ols_fit(&columns, &names, &response)?;
    let statistic = fit.t_statistics[1];

    let table: &[(f64, [f64; 3])] = if include_trend {
        &CONSTANT_AND_TREND
    } else {
        &CONSTANT_ONLY
    };
    let cv = critical_values(table, rows as f64);
    Ok(AdfResult {
        statistic,
        lag_order,
        includes_trend: include_trend,
        p_bound: p_bound(statistic, &cv),
        reject_unit_root_at_5pct: statistic < cv[1],
        effective_n: rows,
    })
}

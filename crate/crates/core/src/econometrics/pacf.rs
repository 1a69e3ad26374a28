//! Partial autocorrelation by successive autoregressions.
//!
//! The value at lag `j` is the last coefficient of an OLS AR(j) fit, so
//! the lag-1 value equals the AR(1) slope by construction. This matches
//! the partial-F reading used to pick an autoregressive order: keep the
//! largest lag whose coefficient is still significant.

use super::ols::ols_fit;
use super::EconError;
use serde::{Deserialize, Serialize};

/// PACF values for lags `1..=max_lag` and the white-noise significance
/// band `1.96 / sqrt(n)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PacfResult {
    /// Value for lag `j` at index `j - 1`.
    pub values: Vec<f64>,
    pub significance_bound: f64,
}

impl PacfResult {
    /// Lags (1-based) whose values exceed the significance bound.
    pub fn significant_lags(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > self.significance_bound)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

/// Build the AR(j) design (intercept plus `j` lag columns) over a series.
fn ar_design(series: &[f64], order: usize) -> (Vec<Vec<f64>>, Vec<String>, Vec<f64>) {
    let n = series.len();
    let rows = n - order;
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
    let mut names: Vec<String> = Vec::with_capacity(order + 1);
    columns.push(vec![1.0; rows]);
    names.push("Constant".to_string());
    for lag in 1..=order {
        columns.push(series[order - lag..n - lag].to_vec());
        names.push(format!("Lag {lag}"));
    }
    let response = series[order..].to_vec();
    (columns, names, response)
}

/// Sample PACF for lags `1..=max_lag`.
///
/// Requires `series.len() > max_lag + 1` so even the deepest
/// autoregression has more rows than parameters.
pub fn pacf(series: &[f64], max_lag: usize) -> Result<PacfResult, EconError> {
    if max_lag == 0 {
        return Err(EconError::TooFewColumns { needed: 1, got: 0 });
    }
    if series.len() <= max_lag + 1 {
        return Err(EconError::TooShort { needed: max_lag + 1, got: series.len() });
    }
    let mut values = Vec::with_capacity(max_lag);
    for order in 1..=max_lag {
        let (columns, names, response) = ar_design(series, order);
        let fit = ols_fit(&columns, &names, &response)?;
        values.push(*fit.coefficients.last().unwrap());
    }
    Ok(PacfResult {
        values,
        significance_bound: 1.96 / (series.len() as f64).sqrt(),
    })
}

/// The autoregressive order suggested by a PACF: the largest lag whose
/// value strictly exceeds the significance bound, or 0 when every lag sits
/// inside the band (a pure-noise series).
pub fn select_ar_order(pacf: &PacfResult) -> usize {
    pacf.values
        .iter()
        .enumerate()
        .rev()
        .find(|(_, v)| v.abs() > pacf.significance_bound)
        .map(|(i, _)| i + 1)
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn standard_normal(rng: &mut ChaCha12Rng) -> f64 {
        // Box-Muller keeps this module's tests free of distribution deps.
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    #[test]
    fn lag_one_equals_ar1_slope() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let mut series = vec![0.0f64];
        for _ in 0..500 {
            let prev = *series.last().unwrap();
            series.push(0.5 * prev + standard_normal(&mut rng));
        }
        let result = pacf(&series, 5).unwrap();
        let (columns, names, response) = ar_design(&series, 1);
        let ar1 = ols_fit(&columns, &names, &response).unwrap();
        assert_eq!(result.values[0], ar1.coefficients[1]);
    }

    #[test]
    fn white_noise_stays_inside_the_band() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let series: Vec<f64> = (0..5000).map(|_| standard_normal(&mut rng)).collect();
        let result = pacf(&series, 20).unwrap();
        let inside = result
            .values
            .iter()
            .filter(|v| v.abs() < result.significance_bound)
            .count();
        assert!(inside >= 19, "only {inside}/20 lags inside the band");
    }

    #[test]
    fn ar1_coefficient_is_recovered_and_higher_lags_die() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let mut series = vec![0.0f64];
        for _ in 0..10_000 {
            let prev = *series.last().unwrap();
            series.push(0.6 * prev + standard_normal(&mut rng));
        }
        let result = pacf(&series, 5).unwrap();
        assert!((result.values[0] - 0.6).abs() < 0.03);
        assert!(result.values[1].abs() < result.significance_bound);
    }

    #[test]
    fn too_short_series_errors() {
        let series = vec![1.0; 6];
        assert!(matches!(
            pacf(&series, 5),
            Err(EconError::TooShort { .. })
        ));
    }

    #[test]
    fn order_selection_rules() {
        let all_inside = PacfResult {
            values: vec![0.01, -0.02, 0.015],
            significance_bound: 0.05,
        };
        assert_eq!(select_ar_order(&all_inside), 0);

        let mut values = vec![0.01; 22];
        values[0] = 0.4;
        values[1] = 0.2;
        values[21] = -0.09;
        let spiky = PacfResult { values, significance_bound: 0.05 };
        assert_eq!(select_ar_order(&spiky), 22);

        // Ties at the boundary are not significant (strict inequality).
        let tie = PacfResult { values: vec![0.05], significance_bound: 0.05 };
        assert_eq!(select_ar_order(&tie), 0);
    }

    #[test]
    fn ar3_order_selected_on_a_long_sample() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let mut series = vec![0.0f64; 3];
        for _ in 0..20_000 {
            let n = series.len();
            let value = 0.35 * series[n - 1] + 0.25 * series[n - 2] + 0.2 * series[n - 3]
                + standard_normal(&mut rng);
            series.push(value);
        }
        let result = pacf(&series, 5).unwrap();
        assert_eq!(select_ar_order(&result), 3);
    }
}

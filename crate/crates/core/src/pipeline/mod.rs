//! Orchestration: ingest -> parameter derivation -> pricing -> error
//! series -> volume regression -> noise-share estimate -> report.
//!
//! Every stage records row counts in the run manifest so drops are always
//! accounted for, and the whole pipeline is deterministic: identical
//! config and inputs produce byte-identical reports.

mod report;
mod synth;

pub use report::{emit_report, render_results_table, ReportSinks};
pub use synth::{synthesize_market, PlantedVolumeModel, SynthConfig, SynthFiles, SynthTruth};

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::econometrics::{
    adf_test, fit_noise_model, ols_fit, pacf, select_ar_order, vif, AdfResult, AnalysisRow,
    AnalysisTable, ErrorColumns, PacfResult, RegressionResult,
};
use crate::market_data::{
    filter_active, load_closes, load_option_records, load_treasury_curves, rate_for_maturity,
    time_to_expiry, trailing_volatility, ChainSchema, OptionRecord, TreasuryCurves,
    VolatilitySeries,
};
use crate::pricing::MarketParams;
use crate::pricing_errors::{compute_errors, descriptive_stats, drop_outliers, ErrorRecord,
    SeriesStats};

/// Two-sided 95% normal quantile used for the delta-method interval and
/// consistent with the PACF significance band.
const Z_95: f64 = 1.96;

/// How the lag structure is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LagMode {
    /// Lags run over the pooled per-contract rows in sorted order
    /// (date, then contract key), so the regression has `rows - k`
    /// observations.
    PooledReplication,
    /// Volume is aggregated per trade date first (sum of contract volume,
    /// mean of each error column) and lags run over the daily series.
    DailyAggregate,
}

impl fmt::Display for LagMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LagMode::PooledReplication => write!(f, "pooled-replication"),
            LagMode::DailyAggregate => write!(f, "daily-aggregate"),
        }
    }
}

impl std::str::FromStr for LagMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pooled-replication" | "pooled" => Ok(LagMode::PooledReplication),
            "daily-aggregate" | "daily" => Ok(LagMode::DailyAggregate),
            other => Err(format!("unknown lag mode '{other}'")),
        }
    }
}

/// Autoregressive order: fixed, or selected from the PACF.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArOrder {
    Auto,
    Fixed(usize),
}

impl fmt::Display for ArOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArOrder::Auto => write!(f, "auto"),
            ArOrder::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl std::str::FromStr for ArOrder {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(ArOrder::Auto);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(ArOrder::Fixed(k)),
            Ok(_) => Err("fixed ar order must be >= 1".to_string()),
            Err(_) => Err(format!("ar order must be 'auto' or a positive integer, got '{s}'")),
        }
    }
}

impl Serialize for ArOrder {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ArOrder::Auto => serializer.serialize_str("auto"),
            ArOrder::Fixed(k) => serializer.serialize_u64(*k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for ArOrder {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = ArOrder;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "\"auto\" or a positive integer")
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<ArOrder, E> {
                if v >= 1 {
                    Ok(ArOrder::Fixed(v as usize))
                } else {
                    Err(E::custom("fixed ar order must be >= 1"))
                }
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<ArOrder, E> {
                if v >= 1 {
                    Ok(ArOrder::Fixed(v as usize))
                } else {
                    Err(E::custom("fixed ar order must be >= 1"))
                }
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<ArOrder, E> {
                v.parse().map_err(E::custom)
            }
        }
        deserializer.deserialize_any(V)
    }
}

/// Which model specifications to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelSpec {
    /// (1) lags plus the BS error only.
    Bs,
    /// (2) lags plus the BAW error only.
    Baw,
    /// (3) lags plus both errors.
    Combined,
}

impl std::str::FromStr for ModelSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bs" | "bs-only" => Ok(ModelSpec::Bs),
            "baw" | "baw-only" => Ok(ModelSpec::Baw),
            "combined" => Ok(ModelSpec::Combined),
            other => Err(format!("unknown model spec '{other}'")),
        }
    }
}

/// Full pipeline configuration; the manifest echoes every field.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub options: PathBuf,
    pub treasury: PathBuf,
    pub closes: PathBuf,
    pub volatility_window: usize,
    pub outlier_threshold: f64,
    pub lag_mode: LagMode,
    pub ar_order: ArOrder,
    pub models: Vec<ModelSpec>,
    /// Seed recorded for provenance when the inputs came from the
    /// synthetic generator; the analysis itself draws no randomness.
    pub seed: u64,
    /// Column-name remapping for the options file.
    pub schema: ChainSchema,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            options: PathBuf::new(),
            treasury: PathBuf::new(),
            closes: PathBuf::new(),
            volatility_window: 21,
            outlier_threshold: 25.0,
            lag_mode: LagMode::PooledReplication,
            ar_order: ArOrder::Fixed(22),
            models: vec![ModelSpec::Bs, ModelSpec::Baw, ModelSpec::Combined],
            seed: 0,
            schema: ChainSchema::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("stage '{stage}' aborted after {rows_so_far} rows: {message}")]
    Stage { stage: &'static str, rows_so_far: usize, message: String },
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("report serialization: {0}")]
    Serialize(#[from] serde_json::Error),
}

fn stage_err(stage: &'static str, rows_so_far: usize, message: impl fmt::Display) -> PipelineError {
    PipelineError::Stage { stage, rows_so_far, message: message.to_string() }
}

/// Row counts through one filter stage; `rows_in == rows_out + dropped`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StageCounts {
    pub rows_in: usize,
    pub rows_out: usize,
    pub dropped: usize,
}

/// Everything needed to audit a run: the full config echo plus row counts
/// at every stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: PipelineConfig,
    pub ingest_rows_read: u64,
    pub ingest_records: usize,
    pub ingest_diagnostics: usize,
    pub activity_filter: StageCounts,
    pub pricing: StageCounts,
    pub pricing_skip_reasons: BTreeMap<String, usize>,
    pub outliers: StageCounts,
    /// Rows in the analysis table (pooled rows or daily aggregates).
    pub analysis_rows: usize,
    pub ar_order_resolved: usize,
    /// `analysis_rows - ar_order_resolved`.
    pub regression_observations: usize,
    /// Error-series size counted per retained row.
    pub error_rows: usize,
    /// The same size counted per model observation (two models per row).
    pub error_observations_two_models: usize,
    pub noise_share_formula: String,
    /// Alternate reading: sum of the marginal models' mean-error effects.
    pub noise_share_alternate_marginal_sum: Option<f64>,
    /// Means entering the share formula are taken over the regression
    /// rows, so the point estimate matches the fitted combination.
    pub share_stats_basis: String,
    /// Generator identity for synthetic inputs; the analysis stage itself
    /// is deterministic and draws nothing.
    pub rng_algorithm: String,
}

/// Systematic-noise share of volume with its 95% delta-method interval.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NoiseShare {
    /// `|phi_bs mean(x_bs) + phi_baw mean(x_baw)|` from the combined model.
    pub point: f64,
    pub low: f64,
    pub high: f64,
    /// Signed combination before the absolute value.
    pub raw_combination: f64,
    /// Delta-method standard error with the error means held fixed.
    pub se: f64,
    /// Set when the lower bound was clamped at zero.
    pub clamped_low: bool,
}

/// Fitted model set: specifications (1), (2), (3).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ModelFits {
    pub bs_only: Option<RegressionResult>,
    pub baw_only: Option<RegressionResult>,
    pub combined: Option<RegressionResult>,
}

/// The complete analysis output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseReport {
    pub models: ModelFits,
    /// Descriptive statistics over every retained error record.
    pub error_stats_bs: SeriesStats,
    pub error_stats_baw: SeriesStats,
    /// Statistics over the regression rows (the share-formula basis).
    pub regression_error_stats_bs: SeriesStats,
    pub regression_error_stats_baw: SeriesStats,
    /// Variance-inflation factors over the combined design's non-intercept
    /// regressors, when the combined model was fitted.
    pub vifs: Option<Vec<(String, f64)>>,
    pub adf: AdfResult,
    pub pacf: PacfResult,
    pub noise_share: Option<NoiseShare>,
    /// Volume summed per trade date (plot data).
    pub daily_volume: Vec<(NaiveDate, u64)>,
    pub manifest: RunManifest,
}

/// Intermediate product of [`build_dataset`].
#[derive(Debug, Clone)]
pub struct BuiltDataset {
    pub table: AnalysisTable,
    /// Post-outlier error records in sorted order.
    pub error_records: Vec<ErrorRecord>,
    pub daily_volume: Vec<(NaiveDate, u64)>,
    pub counts: DatasetCounts,
}

#[derive(Debug, Clone, Default)]
pub struct DatasetCounts {
    pub ingest_rows_read: u64,
    pub ingest_records: usize,
    pub ingest_diagnostics: usize,
    pub active_in: usize,
    pub active_out: usize,
    pub priced_in: usize,
    pub priced_out: usize,
    pub pricing_skipped: usize,
    pub skip_reasons: BTreeMap<String, usize>,
    pub outlier_in: usize,
    pub outlier_retained: usize,
    pub outlier_dropped: usize,
}

fn open(path: &PathBuf, stage: &'static str) -> Result<BufReader<File>, PipelineError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| stage_err(stage, 0, format!("cannot open {}: {e}", path.display())))
}

/// Sort key reproducing the pooled lag order: date, then contract key.
fn contract_order(a: &ErrorRecord, b: &ErrorRecord) -> std::cmp::Ordering {
    a.trade_date
        .cmp(&b.trade_date)
        .then(a.expiration_date.cmp(&b.expiration_date))
        .then(a.strike.total_cmp(&b.strike))
        .then(a.option_type.cmp(&b.option_type))
}

/// Ingest all three inputs, apply the activity filter, price every row
/// under both models, drop outliers, and assemble the analysis table in
/// the configured lag mode.
pub fn build_dataset(config: &PipelineConfig) -> Result<BuiltDataset, PipelineError> {
    let mut counts = DatasetCounts::default();

    // Ingest.
    let chain = load_option_records(open(&config.options, "ingest")?, &config.schema)
        .map_err(|e| stage_err("ingest", 0, e))?;
    counts.ingest_rows_read = chain.rows_read;
    counts.ingest_records = chain.records.len();
    counts.ingest_diagnostics = chain.diagnostics.len();
    if chain.records.is_empty() {
        return Err(stage_err("ingest", 0, "no option records in input"));
    }

    let curves = load_treasury_curves(open(&config.treasury, "treasury")?)
        .map_err(|e| stage_err("treasury", counts.ingest_records, e))?;
    if curves.is_empty() {
        return Err(stage_err("treasury", counts.ingest_records, "no curve days in input"));
    }
    let closes = load_closes(open(&config.closes, "closes")?)
        .map_err(|e| stage_err("closes", counts.ingest_records, e))?;

    // Activity filter.
    counts.active_in = chain.records.len();
    let active = filter_active(&chain.records);
    counts.active_out = active.len();
    if active.is_empty() {
        return Err(stage_err("activity-filter", counts.active_in, "no actively traded rows"));
    }

    // Derived parameters.
    let vol_points = trailing_volatility(&closes, config.volatility_window)
        .map_err(|e| stage_err("volatility", counts.active_out, e))?;
    let vols = VolatilitySeries::new(vol_points);

    // Pricing, parallel across rows with order preserved.
    counts.priced_in = active.len();
    let priced: Vec<Result<ErrorRecord, String>> = active
        .par_iter()
        .map(|record| price_row(record, &vols, &curves))
        .collect();
    let mut error_records = Vec::with_capacity(priced.len());
    for outcome in priced {
        match outcome {
            Ok(record) => error_records.push(record),
            Err(reason) => {
                counts.pricing_skipped += 1;
                *counts.skip_reasons.entry(reason).or_insert(0) += 1;
            }
        }
    }
    counts.priced_out = error_records.len();
    if error_records.is_empty() {
        return Err(stage_err("pricing", counts.priced_in, "every row was skipped"));
    }

    // Outliers.
    counts.outlier_in = error_records.len();
    let (mut retained, dropped) = drop_outliers(error_records, config.outlier_threshold);
    counts.outlier_retained = retained.len();
    counts.outlier_dropped = dropped;
    if retained.is_empty() {
        return Err(stage_err("outliers", counts.outlier_in, "every row was an outlier"));
    }

    retained.sort_by(contract_order);

    // Daily aggregates (volume plot data, and the daily lag mode).
    let mut by_date: BTreeMap<NaiveDate, (u64, f64, f64, usize)> = BTreeMap::new();
    for r in &retained {
        let entry = by_date.entry(r.trade_date).or_insert((0, 0.0, 0.0, 0));
        entry.0 += r.volume;
        entry.1 += r.x_bs;
        entry.2 += r.x_baw;
        entry.3 += 1;
    }
    let daily_volume: Vec<(NaiveDate, u64)> =
        by_date.iter().map(|(date, agg)| (*date, agg.0)).collect();

    let table = match config.lag_mode {
        LagMode::PooledReplication => AnalysisTable {
            rows: retained
                .iter()
                .map(|r| AnalysisRow {
                    date: r.trade_date,
                    volume: r.volume,
                    x_bs: r.x_bs,
                    x_baw: r.x_baw,
                })
                .collect(),
        },
        LagMode::DailyAggregate => AnalysisTable {
            rows: by_date
                .iter()
                .map(|(date, (volume, sum_bs, sum_baw, n))| AnalysisRow {
                    date: *date,
                    volume: *volume,
                    x_bs: sum_bs / *n as f64,
                    x_baw: sum_baw / *n as f64,
                })
                .collect(),
        },
    };

    Ok(BuiltDataset { table, error_records: retained, daily_volume, counts })
}

fn price_row(
    record: &OptionRecord,
    vols: &VolatilitySeries,
    curves: &TreasuryCurves,
) -> Result<ErrorRecord, String> {
    let tte = time_to_expiry(record.trade_date, record.expiration_date);
    if tte <= 0.0 {
        return Err("zero-time-to-expiry".to_string());
    }
    let sigma = match vols.on(record.trade_date) {
        Some(s) => s,
        None => return Err("no-volatility-for-date".to_string()),
    };
    if sigma <= 0.0 {
        return Err("degenerate-volatility".to_string());
    }
    let curve = match curves.on_or_before(record.trade_date) {
        Some(c) => c,
        None => return Err("no-treasury-curve".to_string()),
    };
    let rate = rate_for_maturity(curve, tte);
    // The underlying close is already dividend-adjusted, so the carry
    // equals the rate here.
    let params = MarketParams::new(record.underlying_close, rate, 0.0, sigma)
        .map_err(|e| format!("invalid-params: {e}"))?;
    compute_errors(record, &params).map_err(|_| "pricing-failure".to_string())
}

/// Fit the requested specifications with a shared lag structure.
pub fn run_models(
    table: &AnalysisTable,
    k: usize,
    models: &[ModelSpec],
) -> Result<ModelFits, PipelineError> {
    let mut fits = ModelFits::default();
    let rows = table.len();
    for spec in models {
        let columns = match spec {
            ModelSpec::Bs => ErrorColumns::BS,
            ModelSpec::Baw => ErrorColumns::BAW,
            ModelSpec::Combined => ErrorColumns::BOTH,
        };
        let fit = fit_noise_model(table, k, columns)
            .map_err(|e| stage_err("regression", rows, e))?;
        match spec {
            ModelSpec::Bs => fits.bs_only = Some(fit),
            ModelSpec::Baw => fits.baw_only = Some(fit),
            ModelSpec::Combined => fits.combined = Some(fit),
        }
    }
    Ok(fits)
}

/// Point estimate and 95% interval for the systematic-noise share of
/// volume: the combined model's error coefficients applied to the mean
/// errors, interval by the delta method with the means held fixed.
pub fn estimate_noise_share(
    combined: &RegressionResult,
    bs_stats: &SeriesStats,
    baw_stats: &SeriesStats,
) -> Result<NoiseShare, PipelineError> {
    let bs_idx = combined
        .index_of("BS error")
        .ok_or_else(|| stage_err("noise-share", 0, "combined model lacks the BS error column"))?;
    let baw_idx = combined
        .index_of("BAW error")
        .ok_or_else(|| stage_err("noise-share", 0, "combined model lacks the BAW error column"))?;
    if combined.covariance.len() <= bs_idx.max(baw_idx) {
        return Err(stage_err("noise-share", 0, "missing coefficient covariance"));
    }

    let weights = [bs_stats.mean, baw_stats.mean];
    let coefs = [combined.coefficients[bs_idx], combined.coefficients[baw_idx]];
    let raw = coefs[0] * weights[0] + coefs[1] * weights[1];

    let cov = &combined.covariance;
    let variance = weights[0] * weights[0] * cov[bs_idx][bs_idx]
        + weights[1] * weights[1] * cov[baw_idx][baw_idx]
        + 2.0 * weights[0] * weights[1] * cov[bs_idx][baw_idx];
    let se = variance.max(0.0).sqrt();

    let point = raw.abs();
    let raw_low = point - Z_95 * se;
    let clamped_low = raw_low < 0.0;
    Ok(NoiseShare {
        point,
        low: raw_low.max(0.0),
        high: point + Z_95 * se,
        raw_combination: raw,
        se,
        clamped_low,
    })
}

/// Default PACF depth: enough to see persistent structure while leaving
/// room for the unit-root regression at the selected order.
fn pacf_max_lag(n: usize) -> usize {
    (n / 4).clamp(1, 30)
}

/// Run the whole analysis and assemble the report.
pub fn run_analysis(config: &PipelineConfig) -> Result<NoiseReport, PipelineError> {
    let built = build_dataset(config)?;
    let table = &built.table;
    let volumes = table.volumes();
    let n = volumes.len();

    // Order selection and the PACF series for the report.
    let pacf_result = pacf(&volumes, pacf_max_lag(n))
        .map_err(|e| stage_err("order-selection", n, e))?;
    let ar_order_resolved = match config.ar_order {
        ArOrder::Fixed(k) => k,
        // A pure-noise series selects 0; the autoregression still needs
        // one lag, so floor at 1 (recorded in the manifest either way).
        ArOrder::Auto => select_ar_order(&pacf_result).max(1),
    };

    let adf = adf_test(&volumes, ar_order_resolved, false)
        .map_err(|e| stage_err("stationarity", n, e))?;

    let fits = run_models(table, ar_order_resolved, &config.models)?;

    // Descriptive statistics over all retained records.
    let all_bs: Vec<f64> = built.error_records.iter().map(|r| r.x_bs).collect();
    let all_baw: Vec<f64> = built.error_records.iter().map(|r| r.x_baw).collect();
    let error_stats_bs =
        descriptive_stats(&all_bs).map_err(|e| stage_err("statistics", n, e))?;
    let error_stats_baw =
        descriptive_stats(&all_baw).map_err(|e| stage_err("statistics", n, e))?;

    // Share-formula basis: the regression rows.
    let reg_bs: Vec<f64> = table.rows[ar_order_resolved..].iter().map(|r| r.x_bs).collect();
    let reg_baw: Vec<f64> = table.rows[ar_order_resolved..].iter().map(|r| r.x_baw).collect();
    let regression_error_stats_bs =
        descriptive_stats(&reg_bs).map_err(|e| stage_err("statistics", n, e))?;
    let regression_error_stats_baw =
        descriptive_stats(&reg_baw).map_err(|e| stage_err("statistics", n, e))?;

    let vifs = match &fits.combined {
        Some(combined) => Some(combined_design_vifs(table, ar_order_resolved, combined)?),
        None => None,
    };

    let noise_share = match &fits.combined {
        Some(combined) => Some(estimate_noise_share(
            combined,
            &regression_error_stats_bs,
            &regression_error_stats_baw,
        )?),
        None => None,
    };

    let alternate_marginal_sum = match (&fits.bs_only, &fits.baw_only) {
        (Some(bs), Some(baw)) => {
            let phi_bs = bs.coefficient("BS error").unwrap_or(0.0);
            let phi_baw = baw.coefficient("BAW error").unwrap_or(0.0);
            Some(
                (phi_bs * regression_error_stats_bs.mean).abs()
                    + (phi_baw * regression_error_stats_baw.mean).abs(),
            )
        }
        _ => None,
    };

    let manifest = RunManifest {
        config: config.clone(),
        ingest_rows_read: built.counts.ingest_rows_read,
        ingest_records: built.counts.ingest_records,
        ingest_diagnostics: built.counts.ingest_diagnostics,
        activity_filter: StageCounts {
            rows_in: built.counts.active_in,
            rows_out: built.counts.active_out,
            dropped: built.counts.active_in - built.counts.active_out,
        },
        pricing: StageCounts {
            rows_in: built.counts.priced_in,
            rows_out: built.counts.priced_out,
            dropped: built.counts.pricing_skipped,
        },
        pricing_skip_reasons: built.counts.skip_reasons.clone(),
        outliers: StageCounts {
            rows_in: built.counts.outlier_in,
            rows_out: built.counts.outlier_retained,
            dropped: built.counts.outlier_dropped,
        },
        analysis_rows: table.len(),
        ar_order_resolved,
        regression_observations: table.len() - ar_order_resolved,
        error_rows: built.error_records.len(),
        error_observations_two_models: 2 * built.error_records.len(),
        noise_share_formula:
            "abs(phi_bs * mean(x_bs) + phi_baw * mean(x_baw)) from the combined model; \
             95% interval by the delta method with means held fixed"
                .to_string(),
        noise_share_alternate_marginal_sum: alternate_marginal_sum,
        share_stats_basis: "regression rows (analysis rows minus the lag window)".to_string(),
        rng_algorithm: "ChaCha12 (synthetic generation only; analysis draws nothing)".to_string(),
    };

    Ok(NoiseReport {
        models: fits,
        error_stats_bs,
        error_stats_baw,
        regression_error_stats_bs,
        regression_error_stats_baw,
        vifs,
        adf,
        pacf: pacf_result,
        noise_share,
        daily_volume: built.daily_volume,
        manifest,
    })
}

/// VIFs over the combined design's non-intercept columns (lags plus both
/// error shocks), labeled like the regression output.
fn combined_design_vifs(
    table: &AnalysisTable,
    k: usize,
    combined: &RegressionResult,
) -> Result<Vec<(String, f64)>, PipelineError> {
    let rows = table.len();
    let log_volume: Vec<f64> = table.rows.iter().map(|r| (r.volume as f64).ln()).collect();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(k + 2);
    for lag in 1..=k {
        columns.push(log_volume[k - lag..rows - lag].to_vec());
    }
    columns.push(table.rows[k..].iter().map(|r| r.x_bs).collect());
    columns.push(table.rows[k..].iter().map(|r| r.x_baw).collect());
    let values = vif(&columns).map_err(|e| stage_err("vif", rows, e))?;
    // The VIF design has no intercept column, so skip that label.
    let labels = combined.names.iter().skip(1);
    Ok(labels.cloned().zip(values).collect())
}

/// Refit the combined spec through the plain OLS entry point (same design
/// assembled independently); used by verification tests.
#[doc(hidden)]
pub fn refit_combined_direct(
    table: &AnalysisTable,
    k: usize,
) -> Result<RegressionResult, PipelineError> {
    let rows = table.len();
    let log_volume: Vec<f64> = table.rows.iter().map(|r| (r.volume as f64).ln()).collect();
    let fitted_rows = rows - k;
    let mut columns = vec![vec![1.0; fitted_rows]];
    let mut names = vec!["Constant".to_string()];
    for lag in 1..=k {
        columns.push(log_volume[k - lag..rows - lag].to_vec());
        names.push(format!("Lag {lag}"));
    }
    columns.push(table.rows[k..].iter().map(|r| r.x_bs).collect());
    names.push("BS error".to_string());
    columns.push(table.rows[k..].iter().map(|r| r.x_baw).collect());
    names.push("BAW error".to_string());
    ols_fit(&columns, &names, &log_volume[k..]).map_err(|e| stage_err("regression", rows, e))
}

//! Deterministic synthetic market generator.
//!
//! Produces the three pipeline inputs (option chain, treasury curves,
//! underlying closes) from one seed, with a volume process planted in the
//! exact form the analysis fits: log volume on its own lags plus the two
//! pricing-error shocks. Because mids are written at full round-trip
//! precision and parameters are derived with the same functions the
//! pipeline uses, the error regressors the pipeline reconstructs match
//! the generator's to machine precision, and planted coefficients are
//! recoverable.
//!
//! All randomness flows through ChaCha12 streams derived from the seed;
//! two runs with the same config produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use super::{stage_err, PipelineError};
use crate::market_data::{
    rate_for_maturity, time_to_expiry, trailing_volatility, TreasuryCurveDay, VolatilitySeries,
    TENOR_LABELS, TENOR_YEARS,
};
use crate::pricing::{
    baw_price, bs_price, ExerciseStyle, MarketParams, OptionContractSpec, OptionType,
};

/// The volume process planted into the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedVolumeModel {
    /// Constant of the log-volume equation.
    pub constant: f64,
    /// Lag coefficients, lag 1 first.
    pub ar: Vec<f64>,
    pub phi_bs: f64,
    pub phi_baw: f64,
    /// Standard deviation of the white-noise innovation.
    pub noise_sd: f64,
}

impl Default for PlantedVolumeModel {
    fn default() -> Self {
        // Stationary level exp(3.0 / (1 - 0.5)) ~ 400 contracts per row.
        Self { constant: 3.0, ar: vec![0.3, 0.2], phi_bs: 0.0, phi_baw: 0.0, noise_sd: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub trade_days: usize,
    /// Strikes per expiry, spread around the spot.
    pub strikes_per_expiry: usize,
    /// Expiries as calendar days ahead of each trade date.
    pub expiry_days: Vec<u32>,
    /// Starting underlying level.
    pub s0: f64,
    /// Annual drift of the simulated underlying.
    pub drift: f64,
    /// Annual volatility of the simulated underlying.
    pub gbm_volatility: f64,
    /// Short-tenor yield level, in percent.
    pub base_rate_percent: f64,
    /// Mean of the mid-price noise; a positive value makes markets trade
    /// above model, so pricing errors come out negative on average.
    pub mid_noise_mean: f64,
    pub mid_noise_sd: f64,
    /// Fraction of rows emitted with zero volume (inactive).
    pub inactive_fraction: f64,
    /// Must match the analyzing pipeline's window so the generator prices
    /// with the sigmas the pipeline will derive.
    pub volatility_window: usize,
    pub planted: PlantedVolumeModel,
    /// When set, `phi_bs` is calibrated so the true noise share equals
    /// this value exactly (and `phi_baw` is forced to zero).
    pub target_noise_share: Option<f64>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trade_days: 120,
            strikes_per_expiry: 5,
            expiry_days: vec![30, 60, 91],
            s0: 200.0,
            drift: 0.05,
            gbm_volatility: 0.15,
            base_rate_percent: 1.5,
            mid_noise_mean: 0.2,
            mid_noise_sd: 0.05,
            inactive_fraction: 0.0,
            volatility_window: 21,
            planted: PlantedVolumeModel::default(),
            target_noise_share: None,
        }
    }
}

/// Paths of the three generated inputs.
#[derive(Debug, Clone)]
pub struct SynthFiles {
    pub options: PathBuf,
    pub treasury: PathBuf,
    pub closes: PathBuf,
}

/// Ground truth of a generated market, for verification.
#[derive(Debug, Clone)]
pub struct SynthTruth {
    /// Error coefficients actually planted (after any calibration).
    pub phi_bs: f64,
    pub phi_baw: f64,
    /// `|phi_bs mean(x_bs) + phi_baw mean(x_baw)|` over the regression
    /// rows; equals the target share when one was requested.
    pub true_noise_share: f64,
    pub mean_x_bs: f64,
    pub mean_x_baw: f64,
    pub rows_written: usize,
    pub active_rows: usize,
    pub rng_algorithm: &'static str,
}

fn next_business_day(mut date: NaiveDate) -> NaiveDate {
    loop {
        date = date + Days::new(1);
        if !matches!(date.weekday(), Weekday::Sat | Weekday::Sun) {
            return date;
        }
    }
}

struct PendingRow {
    trade_date: NaiveDate,
    expiration: NaiveDate,
    option_type: OptionType,
    strike: f64,
    bid: f64,
    ask: f64,
    open_interest: u64,
    active: bool,
    x_bs: f64,
    x_baw: f64,
    volume: u64,
}

/// Generate a synthetic market into `out_dir` and return the file paths
/// plus the planted ground truth.
pub fn synthesize_market(
    config: &SynthConfig,
    out_dir: &Path,
) -> Result<(SynthFiles, SynthTruth), PipelineError> {
    if config.trade_days == 0 || config.strikes_per_expiry == 0 || config.expiry_days.is_empty() {
        return Err(stage_err("synthesis", 0, "empty market configuration"));
    }
    let mut market_rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut volume_rng = ChaCha12Rng::seed_from_u64(config.seed ^ 0x9E37_79B9_7F4A_7C15);

    // Underlying closes: discretized geometric Brownian motion over
    // business days, with a warm-up long enough for the trailing window.
    let window = config.volatility_window;
    let total_closes = config.trade_days + window;
    let mut dates = Vec::with_capacity(total_closes);
    let mut date = NaiveDate::from_ymd_opt(2015, 1, 2).unwrap();
    for _ in 0..total_closes {
        dates.push(date);
        date = next_business_day(date);
    }
    let dt = 1.0 / 252.0;
    let mut closes: Vec<(NaiveDate, f64)> = Vec::with_capacity(total_closes);
    let mut level = config.s0;
    for &d in &dates {
        closes.push((d, level));
        let z: f64 = market_rng.sample(StandardNormal);
        level *= ((config.drift - 0.5 * config.gbm_volatility * config.gbm_volatility) * dt
            + config.gbm_volatility * dt.sqrt() * z)
            .exp();
    }

    // Treasury curves: a gently rising term structure with small seeded
    // day-to-day variation, in percent.
    let curves: Vec<TreasuryCurveDay> = dates
        .iter()
        .map(|&d| {
            let mut yields = [0.0f64; 11];
            for (j, tenor) in TENOR_YEARS.iter().enumerate() {
                let z: f64 = market_rng.sample(StandardNormal);
                yields[j] = (config.base_rate_percent + 0.45 * tenor.sqrt() + 0.02 * z).max(0.0);
            }
            TreasuryCurveDay { date: d, yields }
        })
        .collect();

    let vols = VolatilitySeries::new(
        trailing_volatility(&closes, window).map_err(|e| stage_err("synthesis", 0, e))?,
    );

    // Pass 1: contracts, model prices, quotes, and error regressors, in
    // the exact order the pipeline sorts to (date, expiration, strike,
    // type).
    let mut expiries = config.expiry_days.clone();
    expiries.sort_unstable();
    let mut rows: Vec<PendingRow> = Vec::new();
    for (idx, &(trade_date, spot)) in closes.iter().enumerate().skip(window) {
        let sigma = vols
            .on(trade_date)
            .ok_or_else(|| stage_err("synthesis", rows.len(), "missing volatility point"))?;
        if sigma <= 0.0 {
            return Err(stage_err("synthesis", rows.len(), "degenerate simulated volatility"));
        }
        let curve = &curves[idx];
        for &expiry in &expiries {
            let expiration = trade_date + Days::new(expiry as u64);
            let tte = time_to_expiry(trade_date, expiration);
            let rate = rate_for_maturity(curve, tte);
            let params = MarketParams::new(spot, rate, 0.0, sigma)
                .map_err(|e| stage_err("synthesis", rows.len(), e))?;
            for s in 0..config.strikes_per_expiry {
                let moneyness = if config.strikes_per_expiry == 1 {
                    1.0
                } else {
                    0.92 + 0.16 * s as f64 / (config.strikes_per_expiry as f64 - 1.0)
                };
                let strike = (spot * moneyness).round().max(1.0);
                for option_type in [OptionType::Call, OptionType::Put] {
                    let spec = OptionContractSpec::new(
                        option_type,
                        ExerciseStyle::American,
                        strike,
                        tte,
                    )
                    .map_err(|e| stage_err("synthesis", rows.len(), e))?;
                    let twin = OptionContractSpec {
                        exercise_style: ExerciseStyle::European,
                        ..spec
                    };
                    let baw = baw_price(&spec, &params)
                        .map_err(|e| stage_err("synthesis", rows.len(), e))?;
                    let bs = bs_price(&twin, &params)
                        .map_err(|e| stage_err("synthesis", rows.len(), e))?;
                    let z: f64 = market_rng.sample(StandardNormal);
                    let mid =
                        (baw + config.mid_noise_mean + config.mid_noise_sd * z).max(0.005);
                    let half_spread = (0.02 + 0.01 * mid).min(mid);
                    let open_interest = market_rng.gen_range(50..5000u64);
                    let active = !(config.inactive_fraction > 0.0
                        && market_rng.gen::<f64>() < config.inactive_fraction);
                    rows.push(PendingRow {
                        trade_date,
                        expiration,
                        option_type,
                        strike,
                        bid: mid - half_spread,
                        ask: mid + half_spread,
                        open_interest,
                        active,
                        x_bs: bs - mid,
                        x_baw: baw - mid,
                        volume: 0,
                    });
                }
            }
        }
    }

    // Calibration over the rows the regression will actually fit: active
    // rows past the lag window.
    let k = config.planted.ar.len();
    let active_idx: Vec<usize> =
        rows.iter().enumerate().filter(|(_, r)| r.active).map(|(i, _)| i).collect();
    if active_idx.len() < k + 8 {
        return Err(stage_err("synthesis", rows.len(), "too few active rows for the lag window"));
    }
    let regression_rows = &active_idx[k..];
    let mean_x_bs =
        regression_rows.iter().map(|&i| rows[i].x_bs).sum::<f64>() / regression_rows.len() as f64;
    let mean_x_baw =
        regression_rows.iter().map(|&i| rows[i].x_baw).sum::<f64>() / regression_rows.len() as f64;

    let (phi_bs, phi_baw) = match config.target_noise_share {
        Some(target) => {
            if mean_x_bs.abs() < 1e-9 {
                return Err(stage_err(
                    "synthesis",
                    rows.len(),
                    "cannot calibrate a target share against a zero mean error",
                ));
            }
            (target / mean_x_bs, 0.0)
        }
        None => (config.planted.phi_bs, config.planted.phi_baw),
    };
    let true_noise_share = (phi_bs * mean_x_bs + phi_baw * mean_x_baw).abs();

    // Pass 2: volumes along the active chain. Lags reference the stored
    // (rounded) volumes so the fitted model is correctly specified.
    let stationary_level = {
        let ar_sum: f64 = config.planted.ar.iter().sum();
        (config.planted.constant + phi_bs * mean_x_bs + phi_baw * mean_x_baw)
            / (1.0 - ar_sum).max(0.05)
    };
    let mut chain: Vec<f64> = Vec::with_capacity(active_idx.len());
    for &i in &active_idx {
        let mut log_v = config.planted.constant + phi_bs * rows[i].x_bs + phi_baw * rows[i].x_baw;
        for (lag, coef) in config.planted.ar.iter().enumerate() {
            let value = match chain.len().checked_sub(lag + 1) {
                Some(idx) => chain[idx],
                None => stationary_level,
            };
            log_v += coef * value;
        }
        let z: f64 = volume_rng.sample(StandardNormal);
        log_v += config.planted.noise_sd * z;
        let volume = log_v.exp().round().max(1.0) as u64;
        chain.push((volume as f64).ln());
        rows[i].volume = volume;
    }

    // Write the three inputs with round-trip float formatting.
    fs::create_dir_all(out_dir)
        .map_err(|e| PipelineError::Io { path: out_dir.to_path_buf(), source: e })?;
    let files = SynthFiles {
        options: out_dir.join("options.csv"),
        treasury: out_dir.join("treasury.csv"),
        closes: out_dir.join("closes.csv"),
    };
    let io_err = |path: &PathBuf| {
        let path = path.clone();
        move |e: std::io::Error| PipelineError::Io { path, source: e }
    };

    let mut closes_out = String::from("date,adjusted_close\n");
    for (d, c) in &closes {
        closes_out.push_str(&format!("{d},{c}\n"));
    }
    fs::write(&files.closes, closes_out).map_err(io_err(&files.closes))?;

    let mut treasury_out = String::from("date");
    for label in TENOR_LABELS {
        treasury_out.push(',');
        treasury_out.push_str(label);
    }
    treasury_out.push('\n');
    for curve in &curves {
        treasury_out.push_str(&curve.date.to_string());
        for y in curve.yields {
            treasury_out.push_str(&format!(",{y}"));
        }
        treasury_out.push('\n');
    }
    fs::write(&files.treasury, treasury_out).map_err(io_err(&files.treasury))?;

    let mut options_out = String::from(
        "trade_date,expiration,type,strike,bid,ask,volume,open_interest,underlying_close\n",
    );
    let spot_by_date: std::collections::BTreeMap<NaiveDate, f64> = closes.iter().copied().collect();
    for row in &rows {
        let spot = spot_by_date[&row.trade_date];
        options_out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.trade_date,
            row.expiration,
            row.option_type,
            row.strike,
            row.bid,
            row.ask,
            row.volume,
            row.open_interest,
            spot,
        ));
    }
    fs::write(&files.options, options_out).map_err(io_err(&files.options))?;

    let truth = SynthTruth {
        phi_bs,
        phi_baw,
        true_noise_share,
        mean_x_bs,
        mean_x_baw,
        rows_written: rows.len(),
        active_rows: active_idx.len(),
        rng_algorithm: "ChaCha12",
    };
    Ok((files, truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_gives_byte_identical_files() {
        let dir = tempfile::tempdir().unwrap();
        let config = SynthConfig { trade_days: 10, seed: 99, ..SynthConfig::default() };
        let (first, _) = synthesize_market(&config, &dir.path().join("a")).unwrap();
        let (second, _) = synthesize_market(&config, &dir.path().join("b")).unwrap();
        for (a, b) in [
            (&first.options, &second.options),
            (&first.treasury, &second.treasury),
            (&first.closes, &second.closes),
        ] {
            assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
        }
    }

    #[test]
    fn different_seeds_differ() {
        let dir = tempfile::tempdir().unwrap();
        let base = SynthConfig { trade_days: 10, seed: 1, ..SynthConfig::default() };
        let other = SynthConfig { seed: 2, ..base.clone() };
        let (a, _) = synthesize_market(&base, &dir.path().join("a")).unwrap();
        let (b, _) = synthesize_market(&other, &dir.path().join("b")).unwrap();
        assert_ne!(fs::read(a.options).unwrap(), fs::read(b.options).unwrap());
    }

    #[test]
    fn volumes_are_floored_at_one_and_truth_is_consistent() {
        let dir = tempfile::tempdir().unwrap();
        let config = SynthConfig {
            trade_days: 12,
            seed: 5,
            target_noise_share: Some(0.03),
            ..SynthConfig::default()
        };
        let (files, truth) = synthesize_market(&config, dir.path()).unwrap();
        assert!((truth.true_noise_share - 0.03).abs() < 1e-12);
        assert_eq!(truth.phi_baw, 0.0);
        assert_eq!(truth.rng_algorithm, "ChaCha12");
        let text = fs::read_to_string(files.options).unwrap();
        // Header plus one line per written row.
        assert_eq!(text.lines().count(), truth.rows_written + 1);
    }
}

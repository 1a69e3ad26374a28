//! Model-vs-market pricing-error series.
//!
//! For each option row the European-style Black-Scholes price (the lower
//! bound benchmark) and the American Barone-Adesi-Whaley price are
//! compared against the bid/ask mid: `x = model price - market price`.
//! Negative errors mean the model under-estimates the market.

use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market_data::{mid_price, time_to_expiry, OptionRecord};
use crate::pricing::{
    baw_price, bs_price, ExerciseStyle, MarketParams, OptionContractSpec, OptionType, PricingError,
};

/// One analysis row: the contract key, market and model prices, both
/// errors, and the row's volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub trade_date: NaiveDate,
    pub expiration_date: NaiveDate,
    pub strike: f64,
    pub option_type: OptionType,
    /// Bid/ask mid-point.
    pub market_price: f64,
    pub bs_price: f64,
    pub baw_price: f64,
    /// `bs_price - market_price`.
    pub x_bs: f64,
    /// `baw_price - market_price`.
    pub x_baw: f64,
    pub volume: u64,
}

/// Pricing failure tagged with the contract it came from.
#[derive(Debug, Error)]
#[error("pricing {option_type} K={strike} exp={expiration_date} on {trade_date}: {source}")]
pub struct ComputeErrorsError {
    pub trade_date: NaiveDate,
    pub expiration_date: NaiveDate,
    pub strike: f64,
    pub option_type: OptionType,
    #[source]
    pub source: PricingError,
}

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("empty series")]
    Empty,
}

/// Descriptive statistics with the sample (n-1) standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesStats {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    /// Set when n == 1, where the sample sd is undefined and reported as 0.
    pub degenerate_sd: bool,
}

/// Price one record under both models and take the differences against
/// the mid. The Black-Scholes benchmark prices the European twin of the
/// American contract.
pub fn compute_errors(
    record: &OptionRecord,
    params: &MarketParams,
) -> Result<ErrorRecord, ComputeErrorsError> {
    let tte = time_to_expiry(record.trade_date, record.expiration_date);
    let tag = |source: PricingError| ComputeErrorsError {
        trade_date: record.trade_date,
        expiration_date: record.expiration_date,
        strike: record.strike,
        option_type: record.option_type,
        source,
    };
    let american =
        OptionContractSpec::new(record.option_type, ExerciseStyle::American, record.strike, tte)
            .map_err(tag)?;
    let european = OptionContractSpec {
        exercise_style: ExerciseStyle::European,
        ..american
    };
    let bs = bs_price(&european, params).map_err(tag)?;
    let baw = baw_price(&american, params).map_err(tag)?;
    let market = mid_price(record);
    Ok(ErrorRecord {
        trade_date: record.trade_date,
        expiration_date: record.expiration_date,
        strike: record.strike,
        option_type: record.option_type,
        market_price: market,
        bs_price: bs,
        baw_price: baw,
        x_bs: bs - market,
        x_baw: baw - market,
        volume: record.volume,
    })
}

/// Remove rows where either error magnitude exceeds `threshold`.
/// Returns the retained rows (untouched, in order) and the drop count.
pub fn drop_outliers(errors: Vec<ErrorRecord>, threshold: f64) -> (Vec<ErrorRecord>, usize) {
    let before = errors.len();
    let retained: Vec<ErrorRecord> = errors
        .into_iter()
        .filter(|e| e.x_bs.abs() <= threshold && e.x_baw.abs() <= threshold)
        .collect();
    let dropped = before - retained.len();
    (retained, dropped)
}

/// Mean, sample standard deviation, min, and max of a series.
pub fn descriptive_stats(series: &[f64]) -> Result<SeriesStats, SeriesError> {
    if series.is_empty() {
        return Err(SeriesError::Empty);
    }
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let min = series.iter().copied().fold(f64::INFINITY, f64::min);
    let max = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (sd, degenerate_sd) = if n >= 2 {
        let ss: f64 = series.iter().map(|v| (v - mean) * (v - mean)).sum();
        ((ss / (n as f64 - 1.0)).sqrt(), false)
    } else {
        (0.0, true)
    };
    Ok(SeriesStats { n, mean, sd, min, max, degenerate_sd })
}

const ERROR_CSV_HEADER: &str =
    "trade_date,expiration,type,strike,market_price,bs_price,baw_price,x_bs,x_baw,volume";

/// Persist error records as delimiter-separated text so regressions can be
/// rerun without re-pricing.
pub fn write_error_records<W: Write>(records: &[ErrorRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{ERROR_CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.trade_date,
            r.expiration_date,
            r.option_type,
            r.strike,
            r.market_price,
            r.bs_price,
            r.baw_price,
            r.x_bs,
            r.x_baw,
            r.volume
        )?;
    }
    Ok(())
}

/// Read back a file produced by [`write_error_records`].
pub fn load_error_records<R: Read>(source: R) -> Result<Vec<ErrorRecord>, String> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row = row.map_err(|e| format!("row {}: {e}", idx + 2))?;
        let get = |i: usize| row.get(i).ok_or_else(|| format!("row {}: short row", idx + 2));
        let date = |s: &str| {
            NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| format!("row {}: {e}", idx + 2))
        };
        let num = |s: &str| {
            s.parse::<f64>().map_err(|e| format!("row {}: {e}", idx + 2))
        };
        records.push(ErrorRecord {
            trade_date: date(get(0)?)?,
            expiration_date: date(get(1)?)?,
            option_type: match get(2)? {
                "call" => OptionType::Call,
                "put" => OptionType::Put,
                other => return Err(format!("row {}: bad type '{other}'", idx + 2)),
            },
            strike: num(get(3)?)?,
            market_price: num(get(4)?)?,
            bs_price: num(get(5)?)?,
            baw_price: num(get(6)?)?,
            x_bs: num(get(7)?)?,
            x_baw: num(get(8)?)?,
            volume: get(9)?
                .parse::<u64>()
                .map_err(|e| format!("row {}: {e}", idx + 2))?,
        });
    }
    Ok(records)
}

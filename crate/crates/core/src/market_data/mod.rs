//! End-of-day market data: option chains, treasury curves, underlying
//! closes, and the per-row parameters derived from them.
//!
//! Ingest is lossless-or-logged: every input row either becomes a record
//! or produces a [`RowDiagnostic`], so `rows_read == records + diagnostics`
//! holds for every load.

mod options_chain;
mod treasury;
mod volatility;

pub use options_chain::{filter_active, load_option_records, mid_price, ChainLoad, ChainSchema};
pub use treasury::{
    load_treasury_curves, rate_for_maturity, TreasuryCurveDay, TreasuryCurves, TENOR_LABELS,
    TENOR_YEARS,
};
pub use volatility::{load_closes, trailing_volatility, VolatilityPoint, VolatilitySeries};

use crate::pricing::OptionType;
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One end-of-day option-chain row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionRecord {
    pub trade_date: NaiveDate,
    pub expiration_date: NaiveDate,
    pub option_type: OptionType,
    pub strike: f64,
    pub bid: f64,
    pub ask: f64,
    pub volume: u64,
    pub open_interest: u64,
    /// Dividend/split-adjusted close of the underlying on the trade date.
    pub underlying_close: f64,
}

/// Why a row was rejected at ingest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    /// Unparseable field, missing field, or bad date/number.
    Malformed,
    /// ask < bid.
    CrossedQuote,
    /// expiration before trade date.
    ExpiryBeforeTrade,
    /// Non-positive underlying close or strike, negative quote.
    BadValue,
}

/// A rejected input row, with its 1-based line number in the source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowDiagnostic {
    pub line: u64,
    pub reason: RejectReason,
    pub detail: String,
}

#[derive(Debug, Error)]
pub enum MarketDataError {
    #[error("missing required column '{0}'")]
    MissingColumn(String),
    #[error("line {line}: {message}")]
    Format { line: u64, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("closes must be strictly date-ordered (violation at {0})")]
    UnorderedCloses(NaiveDate),
    #[error("non-positive close on {0}")]
    BadClose(NaiveDate),
    #[error("volatility window must be >= 2")]
    WindowTooSmall,
}

/// Year fraction between trade and expiration: calendar days / 365.
///
/// Callers guarantee `expiration_date >= trade_date` (ingest rejects
/// violations).
pub fn time_to_expiry(trade_date: NaiveDate, expiration_date: NaiveDate) -> f64 {
    (expiration_date - trade_date).num_days() as f64 / 365.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    #[test]
    fn time_to_expiry_examples() {
        assert_eq!(time_to_expiry(d("2015-06-01"), d("2015-06-01")), 0.0);
        assert_eq!(time_to_expiry(d("2015-01-01"), d("2016-01-01")), 1.0);
        assert!((time_to_expiry(d("2015-01-01"), d("2015-03-15")) - 0.2).abs() < 1e-15);
    }
}

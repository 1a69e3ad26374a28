//! Option-chain ingestion from delimiter-separated text.

use std::collections::BTreeMap;
use std::io::Read;

use chrono::NaiveDate;
use csv::StringRecord;
use serde::{Deserialize, Serialize};

use super::{MarketDataError, OptionRecord, RejectReason, RowDiagnostic};
use crate::pricing::OptionType;

/// Maps canonical column names to the headers actually present in a file.
/// Unmapped columns default to their canonical name.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ChainSchema {
    #[serde(default)]
    pub rename: BTreeMap<String, String>,
}

impl ChainSchema {
    fn header_for(&self, canonical: &str) -> String {
        match self.rename.get(canonical) {
            Some(actual) => actual.clone(),
            None => canonical.to_string(),
        }
    }
}

/// Result of one chain load. `rows_read` always equals
/// `records.len() + diagnostics.len()`.
#[derive(Debug, Clone)]
pub struct ChainLoad {
    pub records: Vec<OptionRecord>,
    pub diagnostics: Vec<RowDiagnostic>,
    pub rows_read: u64,
}

struct ColumnIndex {
    trade_date: usize,
    expiration: usize,
    option_type: usize,
    strike: usize,
    bid: usize,
    ask: usize,
    volume: usize,
    open_interest: usize,
    underlying_close: usize,
}

fn find_column(headers: &StringRecord, name: &str) -> Result<usize, MarketDataError> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| MarketDataError::MissingColumn(name.to_string()))
}

fn resolve_columns(
    headers: &StringRecord,
    schema: &ChainSchema,
) -> Result<ColumnIndex, MarketDataError> {
    let find = |canonical: &str| find_column(headers, &schema.header_for(canonical));
    Ok(ColumnIndex {
        trade_date: find("trade_date")?,
        expiration: find("expiration")?,
        option_type: find("type")?,
        strike: find("strike")?,
        bid: find("bid")?,
        ask: find("ask")?,
        volume: find("volume")?,
        open_interest: find("open_interest")?,
        underlying_close: find("underlying_close")?,
    })
}

fn field<'a>(record: &'a StringRecord, idx: usize) -> Result<&'a str, String> {
    record.get(idx).map(str::trim).ok_or_else(|| format!("missing field {idx}"))
}

fn parse_date(s: &str, what: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| format!("bad {what} date '{s}'"))
}

fn parse_money(s: &str, what: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("bad {what} '{s}'"))
}

fn parse_count(s: &str, what: &str) -> Result<u64, String> {
    s.parse::<u64>().map_err(|_| format!("bad {what} '{s}'"))
}

fn parse_type(s: &str) -> Result<OptionType, String> {
    match s.to_ascii_lowercase().as_str() {
        "call" | "c" => Ok(OptionType::Call),
        "put" | "p" => Ok(OptionType::Put),
        other => Err(format!("bad option type '{other}'")),
    }
}

fn parse_row(record: &StringRecord, cols: &ColumnIndex) -> Result<OptionRecord, (RejectReason, String)> {
    let malformed = |m: String| (RejectReason::Malformed, m);
    let trade_date = parse_date(field(record, cols.trade_date).map_err(malformed)?, "trade")
        .map_err(malformed)?;
    let expiration_date =
        parse_date(field(record, cols.expiration).map_err(malformed)?, "expiration")
            .map_err(malformed)?;
    let option_type = parse_type(field(record, cols.option_type).map_err(malformed)?)
        .map_err(malformed)?;
    let strike =
        parse_money(field(record, cols.strike).map_err(malformed)?, "strike").map_err(malformed)?;
    let bid = parse_money(field(record, cols.bid).map_err(malformed)?, "bid").map_err(malformed)?;
    let ask = parse_money(field(record, cols.ask).map_err(malformed)?, "ask").map_err(malformed)?;
    let volume = parse_count(field(record, cols.volume).map_err(malformed)?, "volume")
        .map_err(malformed)?;
    let open_interest = parse_count(
        field(record, cols.open_interest).map_err(malformed)?,
        "open interest",
    )
    .map_err(malformed)?;
    let underlying_close = parse_money(
        field(record, cols.underlying_close).map_err(malformed)?,
        "underlying close",
    )
    .map_err(malformed)?;

    if bid < 0.0 || ask < 0.0 {
        return Err((RejectReason::BadValue, format!("negative quote bid={bid} ask={ask}")));
    }
    if ask < bid {
        return Err((RejectReason::CrossedQuote, format!("ask {ask} < bid {bid}")));
    }
    if expiration_date < trade_date {
        return Err((
            RejectReason::ExpiryBeforeTrade,
            format!("expiration {expiration_date} before trade {trade_date}"),
        ));
    }
    if strike <= 0.0 {
        return Err((RejectReason::BadValue, format!("non-positive strike {strike}")));
    }
    if underlying_close <= 0.0 {
        return Err((
            RejectReason::BadValue,
            format!("non-positive underlying close {underlying_close}"),
        ));
    }

    Ok(OptionRecord {
        trade_date,
        expiration_date,
        option_type,
        strike,
        bid,
        ask,
        volume,
        open_interest,
        underlying_close,
    })
}

/// Load option-chain rows from delimiter-separated text with a header row.
///
/// Well-formed rows become records; malformed or invariant-violating rows
/// become diagnostics with their line number — nothing is silently
/// dropped. A missing required column is a schema error; an unreadable
/// stream is a format error.
pub fn load_option_records<R: Read>(
    source: R,
    schema: &ChainSchema,
) -> Result<ChainLoad, MarketDataError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let headers = reader
        .headers()
        .map_err(|e| MarketDataError::Format { line: 1, message: e.to_string() })?
        .clone();
    let cols = resolve_columns(&headers, schema)?;

    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    let mut rows_read = 0u64;
    // Header occupies line 1; data rows start at line 2.
    let mut line = 1u64;

    for row in reader.into_records() {
        rows_read += 1;
        line += 1;
        match row {
            Ok(record) => {
                let at = record.position().map(|p| p.line()).unwrap_or(line);
                match parse_row(&record, &cols) {
                    Ok(parsed) => records.push(parsed),
                    Err((reason, detail)) => {
                        diagnostics.push(RowDiagnostic { line: at, reason, detail })
                    }
                }
            }
            Err(e) => {
                let at = e.position().map(|p| p.line()).unwrap_or(line);
                diagnostics.push(RowDiagnostic {
                    line: at,
                    reason: RejectReason::Malformed,
                    detail: e.to_string(),
                });
            }
        }
    }

    Ok(ChainLoad { records, diagnostics, rows_read })
}

/// Keep only rows with trading activity: volume > 0 and open interest > 0.
/// Input order is preserved; applying the filter twice is a no-op.
pub fn filter_active(records: &[OptionRecord]) -> Vec<OptionRecord> {
    records
        .iter()
        .filter(|r| r.volume > 0 && r.open_interest > 0)
        .copied()
        .collect()
}

/// Observed market price: the bid/ask mid-point.
pub fn mid_price(record: &OptionRecord) -> f64 {
    (record.bid + record.ask) / 2.0
}

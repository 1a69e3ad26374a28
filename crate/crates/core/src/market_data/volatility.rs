//! Trailing historical volatility from daily closes.

use std::io::Read;

use chrono::NaiveDate;

use super::MarketDataError;

/// Annualized volatility attached to a date.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolatilityPoint {
    pub date: NaiveDate,
    /// Annualized sigma, >= 0. A zero value marks a degenerate (constant
    /// price) window; pricing requires sigma > 0 and skips such dates.
    pub sigma: f64,
}

/// Date-indexed volatility lookups.
#[derive(Debug, Clone, Default)]
pub struct VolatilitySeries {
    points: Vec<VolatilityPoint>,
}

impl VolatilitySeries {
    pub fn new(points: Vec<VolatilityPoint>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[VolatilityPoint] {
        &self.points
    }

    /// Sigma on exactly `date`, if the warm-up horizon covers it.
    pub fn on(&self, date: NaiveDate) -> Option<f64> {
        self.points
            .binary_search_by_key(&date, |p| p.date)
            .ok()
            .map(|idx| self.points[idx].sigma)
    }
}

/// Trailing historical volatility.
///
/// For each date with at least `window` prior returns, sigma is the sample
/// standard deviation (n-1 denominator) of the trailing `window` log
/// returns, annualized by sqrt(252). Dates inside the warm-up horizon
/// produce no point, so the output has `closes.len() - window` entries.
pub fn trailing_volatility(
    closes: &[(NaiveDate, f64)],
    window: usize,
) -> Result<Vec<VolatilityPoint>, MarketDataError> {
    if window < 2 {
        return Err(MarketDataError::WindowTooSmall);
    }
    for pair in closes.windows(2) {
        if pair[1].0 <= pair[0].0 {
            return Err(MarketDataError::UnorderedCloses(pair[1].0));
        }
    }
    for &(date, close) in closes {
        if !(close.is_finite() && close > 0.0) {
            return Err(MarketDataError::BadClose(date));
        }
    }
    if closes.len() < window + 1 {
        return Ok(Vec::new());
    }

    let returns: Vec<f64> = closes
        .windows(2)
        .map(|pair| (pair[1].1 / pair[0].1).ln())
        .collect();

    let annualize = 252f64.sqrt();
    let mut points = Vec::with_capacity(closes.len() - window);
    // The point at close index j uses returns ending at j, i.e. indices
    // (j - window)..j of the return series.
    for j in window..closes.len() {
        let slice = &returns[j - window..j];
        let mean = slice.iter().sum::<f64>() / window as f64;
        let ss: f64 = slice.iter().map(|r| (r - mean) * (r - mean)).sum();
        let daily_sd = (ss / (window as f64 - 1.0)).sqrt();
        points.push(VolatilityPoint {
            date: closes[j].0,
            sigma: daily_sd * annualize,
        });
    }
    Ok(points)
}

/// Load an underlying-closes file: a `date` column and an adjusted-close
/// column (`adjusted_close`, `adj_close`, or `close`).
pub fn load_closes<R: Read>(source: R) -> Result<Vec<(NaiveDate, f64)>, MarketDataError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = reader
        .headers()
        .map_err(|e| MarketDataError::Format { line: 1, message: e.to_string() })?
        .clone();
    let lowered: Vec<String> = headers.iter().map(|h| h.trim().to_ascii_lowercase()).collect();
    let date_idx = lowered
        .iter()
        .position(|h| h == "date")
        .ok_or_else(|| MarketDataError::MissingColumn("date".to_string()))?;
    let close_idx = lowered
        .iter()
        .position(|h| h == "adjusted_close" || h == "adj_close" || h == "close")
        .ok_or_else(|| MarketDataError::MissingColumn("adjusted_close".to_string()))?;

    let mut closes = Vec::new();
    let mut line = 1u64;
    for row in reader.into_records() {
        line += 1;
        let record = row.map_err(|e| MarketDataError::Format {
            line: e.position().map(|p| p.line()).unwrap_or(line),
            message: e.to_string(),
        })?;
        let at = record.position().map(|p| p.line()).unwrap_or(line);
        let bad = |message: String| MarketDataError::Format { line: at, message };
        let date_str = record.get(date_idx).unwrap_or("").trim();
        let date = NaiveDate::parse_from_str(date_str, "%Y-%m-%d")
            .map_err(|_| bad(format!("bad date '{date_str}'")))?;
        let close_str = record.get(close_idx).unwrap_or("").trim();
        let close: f64 = close_str
            .parse()
            .map_err(|_| bad(format!("bad close '{close_str}'")))?;
        closes.push((date, close));
    }
    Ok(closes)
}

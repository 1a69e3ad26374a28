//! Treasury yield curves and maturity-matched rate lookup.

use std::io::Read;

use chrono::NaiveDate;

use super::MarketDataError;

/// Curve tenors in years, shortest first.
pub const TENOR_YEARS: [f64; 11] = [
    1.0 / 12.0,
    0.25,
    0.5,
    1.0,
    2.0,
    3.0,
    5.0,
    7.0,
    10.0,
    20.0,
    30.0,
];

/// Column labels for the tenors, as written in curve files.
pub const TENOR_LABELS: [&str; 11] = [
    "X1.mo", "X3.mo", "X6.mo", "X1.yr", "X2.yr", "X3.yr", "X5.yr", "X7.yr", "X10.yr", "X20.yr",
    "X30.yr",
];

/// One day's constant-maturity yields, in percent per annum, ordered by
/// tenor as in [`TENOR_YEARS`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreasuryCurveDay {
    pub date: NaiveDate,
    pub yields: [f64; 11],
}

/// A date-sorted set of curve days with carry-forward lookup, so option
/// trade dates falling on rate-market holidays use the latest prior curve.
#[derive(Debug, Clone, Default)]
pub struct TreasuryCurves {
    days: Vec<TreasuryCurveDay>,
}

impl TreasuryCurves {
    pub fn new(mut days: Vec<TreasuryCurveDay>) -> Self {
        days.sort_by_key(|d| d.date);
        Self { days }
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn days(&self) -> &[TreasuryCurveDay] {
        &self.days
    }

    /// The curve on `date`, or the most recent prior curve.
    pub fn on_or_before(&self, date: NaiveDate) -> Option<&TreasuryCurveDay> {
        match self.days.partition_point(|d| d.date <= date) {
            0 => None,
            n => Some(&self.days[n - 1]),
        }
    }
}

/// Normalize a tenor header: strip a leading `X`, drop dots, lowercase.
/// `X1.mo`, `1mo`, and `x1.MO` all name the one-month tenor.
fn normalize_header(raw: &str) -> String {
    let trimmed = raw.trim();
    let stripped = trimmed
        .strip_prefix('X')
        .or_else(|| trimmed.strip_prefix('x'))
        .unwrap_or(trimmed);
    stripped.replace('.', "").to_ascii_lowercase()
}

fn canonical_tenor_key(label: &str) -> String {
    normalize_header(label)
}

/// Load a treasury-curve file: a `date` column plus the 11 tenor columns
/// (percent per annum). Tenor headers are matched after normalization, so
/// both `X1.mo` and `1mo` work.
pub fn load_treasury_curves<R: Read>(source: R) -> Result<TreasuryCurves, MarketDataError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = reader
        .headers()
        .map_err(|e| MarketDataError::Format { line: 1, message: e.to_string() })?
        .clone();

    let normalized: Vec<String> = headers.iter().map(normalize_header).collect();
    let date_idx = normalized
        .iter()
        .position(|h| h == "date")
        .ok_or_else(|| MarketDataError::MissingColumn("date".to_string()))?;
    let mut tenor_idx = [0usize; 11];
    for (slot, label) in TENOR_LABELS.iter().enumerate() {
        let key = canonical_tenor_key(label);
        tenor_idx[slot] = normalized
            .iter()
            .position(|h| *h == key)
            .ok_or_else(|| MarketDataError::MissingColumn(label.to_string()))?;
    }

    let mut days = Vec::new();
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
        let mut yields = [0.0f64; 11];
        for (slot, &idx) in tenor_idx.iter().enumerate() {
            let raw = record.get(idx).unwrap_or("").trim();
            let value: f64 = raw
                .parse()
                .map_err(|_| bad(format!("bad yield '{raw}' in {}", TENOR_LABELS[slot])))?;
            if !value.is_finite() || value < 0.0 {
                return Err(bad(format!("negative yield {value} in {}", TENOR_LABELS[slot])));
            }
            yields[slot] = value;
        }
        days.push(TreasuryCurveDay { date, yields });
    }
    Ok(TreasuryCurves::new(days))
}

/// Maturity-matched rate as a decimal per annum.
///
/// Linear interpolation between the bracketing tenors, flat extrapolation
/// below one month and above thirty years; file yields are percent, so the
/// result is divided by 100. Continuous and piecewise linear in maturity,
/// equal to the node yields at the node tenors exactly.
pub fn rate_for_maturity(curve: &TreasuryCurveDay, time_to_expiry: f64) -> f64 {
    let percent = if time_to_expiry <= TENOR_YEARS[0] {
        curve.yields[0]
    } else if time_to_expiry >= TENOR_YEARS[10] {
        curve.yields[10]
    } else {
        let hi = TENOR_YEARS.partition_point(|&t| t < time_to_expiry);
        if TENOR_YEARS[hi] == time_to_expiry {
            curve.yields[hi]
        } else {
            let lo = hi - 1;
            let weight =
                (time_to_expiry - TENOR_YEARS[lo]) / (TENOR_YEARS[hi] - TENOR_YEARS[lo]);
            curve.yields[lo] + weight * (curve.yields[hi] - curve.yields[lo])
        }
    };
    percent / 100.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn curve() -> TreasuryCurveDay {
        TreasuryCurveDay {
            date: d("2015-06-01"),
            yields: [0.12, 0.20, 0.31, 0.468, 0.76, 1.01, 1.43, 1.76, 1.99, 2.38, 2.72],
        }
    }

    #[test]
    fn node_tenor_is_exact_with_unit_conversion() {
        assert_eq!(rate_for_maturity(&curve(), 1.0), 0.00468);
        assert_eq!(rate_for_maturity(&curve(), 10.0), 0.0199);
    }

    #[test]
    fn midpoint_interpolates_linearly() {
        let t = 0.5 * (1.0 / 12.0 + 0.25);
        assert!((rate_for_maturity(&curve(), t) - 0.0016).abs() < 1e-15);
    }

    #[test]
    fn flat_extrapolation_outside_the_curve() {
        assert!((rate_for_maturity(&curve(), 40.0) - 0.0272).abs() < 1e-15);
        assert!((rate_for_maturity(&curve(), 0.01) - 0.0012).abs() < 1e-15);
    }

    #[test]
    fn piecewise_linear_and_continuous() {
        let c = curve();
        let mut prev = rate_for_maturity(&c, 0.01);
        let mut t = 0.02;
        while t < 31.0 {
            let r = rate_for_maturity(&c, t);
            // Yields in the fixture rise with tenor, so the interpolant
            // must be nondecreasing; continuity follows from small steps.
            assert!(r >= prev - 1e-12);
            assert!((r - prev).abs() < 1e-3);
            prev = r;
            t += 0.01;
        }
    }

    #[test]
    fn loads_paper_style_headers_and_carries_forward() {
        let text = "date,X1.mo,X3.mo,X6.mo,X1.yr,X2.yr,X3.yr,X5.yr,X7.yr,X10.yr,X20.yr,X30.yr\n\
                    2015-06-01,0.12,0.20,0.31,0.468,0.76,1.01,1.43,1.76,1.99,2.38,2.72\n\
                    2015-06-03,0.13,0.21,0.32,0.47,0.77,1.02,1.44,1.77,2.00,2.39,2.73\n";
        let curves = load_treasury_curves(text.as_bytes()).unwrap();
        assert_eq!(curves.len(), 2);
        // Holiday on 06-02: carried forward from 06-01.
        let carried = curves.on_or_before(d("2015-06-02")).unwrap();
        assert_eq!(carried.date, d("2015-06-01"));
        assert!(curves.on_or_before(d("2015-05-31")).is_none());
    }

    #[test]
    fn bare_tenor_headers_also_load() {
        let text = "date,1mo,3mo,6mo,1yr,2yr,3yr,5yr,7yr,10yr,20yr,30yr\n\
                    2015-06-01,0.12,0.20,0.31,0.468,0.76,1.01,1.43,1.76,1.99,2.38,2.72\n";
        assert_eq!(load_treasury_curves(text.as_bytes()).unwrap().len(), 1);
    }

    #[test]
    fn missing_tenor_is_schema_error() {
        let text = "date,X1.mo,X3.mo,X6.mo,X1.yr,X2.yr,X3.yr,X5.yr,X7.yr,X10.yr,X20.yr\n\
                    2015-06-01,0.12,0.20,0.31,0.468,0.76,1.01,1.43,1.76,1.99,2.38\n";
        match load_treasury_curves(text.as_bytes()).unwrap_err() {
            MarketDataError::MissingColumn(name) => assert_eq!(name, "X30.yr"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_yield_is_format_error_with_line() {
        let text = "date,X1.mo,X3.mo,X6.mo,X1.yr,X2.yr,X3.yr,X5.yr,X7.yr,X10.yr,X20.yr,X30.yr\n\
                    2015-06-01,0.12,0.20,0.31,0.468,0.76,1.01,1.43,1.76,1.99,2.38,2.72\n\
                    2015-06-02,-0.05,0.20,0.31,0.468,0.76,1.01,1.43,1.76,1.99,2.38,2.72\n";
        match load_treasury_curves(text.as_bytes()).unwrap_err() {
            MarketDataError::Format { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}

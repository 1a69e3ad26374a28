//! Report rendering: the three-column regression table, the full
//! machine-readable report, and plot-data files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::{NoiseReport, PipelineError};
use crate::econometrics::RegressionResult;

/// Output paths for one report.
#[derive(Debug, Clone)]
pub struct ReportSinks {
    /// Human-readable results table and summary sections.
    pub table: PathBuf,
    /// Machine-readable full report (JSON).
    pub machine: PathBuf,
    /// Plot data: volume per trade date.
    pub volume_plot: PathBuf,
    /// Plot data: PACF bars with the significance band.
    pub pacf_plot: PathBuf,
}

impl ReportSinks {
    /// Conventional file names inside one output directory.
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            table: dir.join("report.txt"),
            machine: dir.join("report.json"),
            volume_plot: dir.join("volume_series.csv"),
            pacf_plot: dir.join("pacf.csv"),
        }
    }
}

fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

fn group_thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

fn f_statistic_cell(fit: &RegressionResult) -> String {
    let (df1, df2) = fit.f_df;
    let star = if df1 > 0 && df2 > 0 && fit.f_statistic.is_finite() {
        let dist = FisherSnedecor::new(df1 as f64, df2 as f64).expect("positive df");
        stars(1.0 - dist.cdf(fit.f_statistic))
    } else {
        ""
    };
    format!("{:.3}{} (df = {}; {})", fit.f_statistic, star, df1, df2)
}

const CELL_WIDTH: usize = 30;
const LABEL_WIDTH: usize = 22;

fn coefficient_cell(fit: &RegressionResult, name: &str) -> String {
    match fit.index_of(name) {
        Some(idx) => format!(
            "{:.3}{} ({:.3})",
            fit.coefficients[idx],
            stars(fit.p_values[idx]),
            fit.standard_errors[idx]
        ),
        None => String::new(),
    }
}

/// Render the results table: one row per regressor (both error shocks
/// first, then the lags, then the constant), one column per fitted
/// specification, cells as `coefficient<stars> (se)`, plus the summary
/// block and the significance legend.
pub fn render_results_table(report: &NoiseReport) -> String {
    let columns: Vec<(&str, &RegressionResult)> = [
        ("(1)", report.models.bs_only.as_ref()),
        ("(2)", report.models.baw_only.as_ref()),
        ("(3)", report.models.combined.as_ref()),
    ]
    .into_iter()
    .filter_map(|(label, fit)| fit.map(|f| (label, f)))
    .collect();

    let mut out = String::new();
    let table_width = LABEL_WIDTH + CELL_WIDTH * columns.len();
    let _ = writeln!(out, "{:^width$}", "Effect on log market volume", width = table_width);
    let _ = writeln!(out, "{}", "=".repeat(table_width));
    let _ = write!(out, "{:<LABEL_WIDTH$}", "");
    for (label, _) in &columns {
        let _ = write!(out, "{label:^CELL_WIDTH$}");
    }
    out.push('\n');
    let _ = writeln!(out, "{}", "-".repeat(table_width));

    // Row labels: error shocks, lags (from any fitted model), constant.
    let k = columns
        .iter()
        .map(|(_, fit)| fit.names.iter().filter(|n| n.starts_with("Lag ")).count())
        .max()
        .unwrap_or(0);
    let mut row_labels: Vec<String> = vec!["BS error".to_string(), "BAW error".to_string()];
    for lag in 1..=k {
        row_labels.push(format!("Lag {lag}"));
    }
    row_labels.push("Constant".to_string());

    for label in &row_labels {
        if !columns.iter().any(|(_, fit)| fit.index_of(label).is_some()) {
            continue;
        }
        let _ = write!(out, "{label:<LABEL_WIDTH$}");
        for (_, fit) in &columns {
            let _ = write!(out, "{:^CELL_WIDTH$}", coefficient_cell(fit, label));
        }
        out.push('\n');
    }

    let _ = writeln!(out, "{}", "-".repeat(table_width));
    type SummaryCell = Box<dyn Fn(&RegressionResult) -> String>;
    let summary_rows: Vec<(&str, SummaryCell)> = vec![
        ("Observations", Box::new(|f: &RegressionResult| group_thousands(f.n_observations))),
        ("R2", Box::new(|f: &RegressionResult| format!("{:.3}", f.r_squared))),
        ("Adjusted R2", Box::new(|f: &RegressionResult| format!("{:.3}", f.adjusted_r_squared))),
        (
            "Residual Std. Error",
            Box::new(|f: &RegressionResult| {
                format!("{:.3} (df = {})", f.residual_std_error, f.residual_df)
            }),
        ),
        ("F Statistic", Box::new(f_statistic_cell)),
    ];
    for (label, render) in summary_rows {
        let _ = write!(out, "{label:<LABEL_WIDTH$}");
        for (_, fit) in &columns {
            let _ = write!(out, "{:^CELL_WIDTH$}", render(fit));
        }
        out.push('\n');
    }
    let _ = writeln!(out, "{}", "=".repeat(table_width));
    let _ = writeln!(out, "Note: *** p<0.01; ** p<0.05; * p<0.1");
    out.push('\n');

    // Pricing-error summary.
    let _ = writeln!(out, "Pricing errors (model - market), all retained rows:");
    for (name, stats) in [("BS", &report.error_stats_bs), ("BAW", &report.error_stats_baw)] {
        let _ = writeln!(
            out,
            "  {name:<4} n = {}  mean = {:.3}  sd = {:.3}  min = {:.3}  max = {:.3}",
            group_thousands(stats.n),
            stats.mean,
            stats.sd,
            stats.min,
            stats.max
        );
    }
    out.push('\n');

    if let Some(vifs) = &report.vifs {
        let _ = writeln!(out, "Variance-inflation factors (combined design):");
        for (name, value) in vifs {
            if name == "BS error" || name == "BAW error" {
                let _ = writeln!(out, "  {name}: {value:.4}");
            }
        }
        let max_lag_vif = vifs
            .iter()
            .filter(|(name, _)| name.starts_with("Lag "))
            .map(|(_, v)| *v)
            .fold(f64::NAN, f64::max);
        if max_lag_vif.is_finite() {
            let _ = writeln!(out, "  All lags: <= {max_lag_vif:.4}");
        }
        out.push('\n');
    }

    let _ = writeln!(out, "Unit-root test (constant, no trend):");
    let _ = writeln!(
        out,
        "  statistic = {:.4}  lag order = {}  {}  reject at 5%: {}",
        report.adf.statistic,
        report.adf.lag_order,
        report.adf.p_bound,
        if report.adf.reject_unit_root_at_5pct { "yes" } else { "no" }
    );
    out.push('\n');

    if let Some(share) = &report.noise_share {
        let _ = writeln!(out, "Systematic-noise share of volume (combined model):");
        let _ = writeln!(
            out,
            "  point = {:.2}%  95% interval = [{:.2}%, {:.2}%]{}",
            100.0 * share.point,
            100.0 * share.low,
            100.0 * share.high,
            if share.clamped_low { "  (lower bound clamped at 0)" } else { "" }
        );
    }

    out
}

fn write_file(path: &PathBuf, contents: &str) -> Result<(), PipelineError> {
    fs::write(path, contents).map_err(|e| PipelineError::Io { path: path.clone(), source: e })
}

/// Write the report to its four sinks. Re-running on the same report
/// produces identical bytes.
pub fn emit_report(report: &NoiseReport, sinks: &ReportSinks) -> Result<(), PipelineError> {
    write_file(&sinks.table, &render_results_table(report))?;

    let mut machine = serde_json::to_string_pretty(report)?;
    machine.push('\n');
    write_file(&sinks.machine, &machine)?;

    let mut volume_csv = String::from("date,volume\n");
    for (date, volume) in &report.daily_volume {
        let _ = writeln!(volume_csv, "{date},{volume}");
    }
    write_file(&sinks.volume_plot, &volume_csv)?;

    let mut pacf_csv = String::from("lag,pacf,bound_upper,bound_lower\n");
    let bound = report.pacf.significance_bound;
    for (i, value) in report.pacf.values.iter().enumerate() {
        let _ = writeln!(pacf_csv, "{},{},{},{}", i + 1, value, bound, -bound);
    }
    write_file(&sinks.pacf_plot, &pacf_csv)?;

    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thousands_grouping() {
        assert_eq!(group_thousands(5), "5");
        assert_eq!(group_thousands(705_863), "705,863");
        assert_eq!(group_thousands(2_089_590), "2,089,590");
    }

    #[test]
    fn star_thresholds() {
        assert_eq!(stars(0.004), "***");
        assert_eq!(stars(0.02), "**");
        assert_eq!(stars(0.07), "*");
        assert_eq!(stars(0.2), "");
    }
}

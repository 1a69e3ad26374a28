//! `optnoise`: price options, ingest end-of-day chains, and estimate the
//! share of option volume attributable to systematic noise from pricing
//! model disagreement.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use optnoise_core::econometrics::{adf_test, pacf, select_ar_order};
use optnoise_core::pipeline::{
    emit_report, run_analysis, synthesize_market, ArOrder, LagMode, ModelSpec, PipelineConfig,
    PlantedVolumeModel, ReportSinks, SynthConfig,
};
use optnoise_core::pricing::{
    baw_intermediates, baw_price, bs_price, crr_binomial_price, ExerciseStyle, MarketParams,
    OptionContractSpec, OptionType,
};
use optnoise_core::pricing_errors::write_error_records;

#[derive(Parser)]
#[command(
    name = "optnoise",
    version,
    about = "Option pricing and systematic-noise volume analysis",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price a single option under one model.
    Price(PriceArgs),
    /// Run the full chain-to-report analysis pipeline.
    Analyze(AnalyzeArgs),
    /// Generate a deterministic synthetic market (options, treasury, closes).
    Synth(SynthArgs),
    /// Partial autocorrelation of a series file, with lag selection.
    Pacf(PacfArgs),
    /// Augmented Dickey-Fuller unit-root test on a series file.
    Adf(AdfArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Bs,
    Baw,
    Crr,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TypeArg {
    Call,
    Put,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StyleArg {
    European,
    American,
}

#[derive(Args)]
struct PriceArgs {
    /// Pricing model.
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Option type.
    #[arg(long = "type", value_enum)]
    option_type: TypeArg,
    /// Exercise style; defaults to european for bs/crr and american for baw.
    #[arg(long, value_enum)]
    style: Option<StyleArg>,
    /// Underlying price.
    #[arg(long)]
    spot: f64,
    /// Strike price.
    #[arg(long)]
    strike: f64,
    /// Risk-free rate per annum (decimal).
    #[arg(long)]
    rate: f64,
    /// Continuous dividend yield per annum (decimal).
    #[arg(long, default_value_t = 0.0)]
    div_yield: f64,
    /// Annualized volatility (decimal).
    #[arg(long)]
    sigma: f64,
    /// Time to expiry in years.
    #[arg(long)]
    tte: f64,
    /// Lattice steps (crr only).
    #[arg(long, default_value_t = 1000)]
    steps: usize,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Option-chain CSV.
    #[arg(long)]
    options: Option<PathBuf>,
    /// Treasury-curve CSV.
    #[arg(long)]
    treasury: Option<PathBuf>,
    /// Underlying-closes CSV.
    #[arg(long)]
    closes: Option<PathBuf>,
    /// Directory for report.txt, report.json, volume_series.csv, pacf.csv.
    #[arg(long)]
    out_dir: PathBuf,
    /// TOML config with the same keys; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Trailing-volatility window in trading days.
    #[arg(long)]
    volatility_window: Option<usize>,
    /// Drop rows where either |error| exceeds this (currency).
    #[arg(long)]
    outlier_threshold: Option<f64>,
    /// pooled-replication or daily-aggregate.
    #[arg(long)]
    lag_mode: Option<LagMode>,
    /// Autoregressive order: a positive integer or 'auto' (PACF-selected).
    #[arg(long)]
    ar_order: Option<ArOrder>,
    /// Comma-separated subset of bs,baw,combined.
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<ModelSpec>>,
    /// Seed recorded in the manifest (provenance for synthetic inputs).
    #[arg(long)]
    seed: Option<u64>,
    /// Remap a required column to a file header, e.g. --rename trade_date=date.
    #[arg(long = "rename", value_parser = parse_rename)]
    renames: Vec<(String, String)>,
    /// Also persist the per-row error records to this CSV.
    #[arg(long)]
    errors_out: Option<PathBuf>,
}

fn parse_rename(value: &str) -> Result<(String, String), String> {
    match value.split_once('=') {
        Some((canonical, actual)) if !canonical.is_empty() && !actual.is_empty() => {
            Ok((canonical.to_string(), actual.to_string()))
        }
        _ => Err(format!("expected canonical=actual, got '{value}'")),
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory for options.csv, treasury.csv, closes.csv.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of trade dates.
    #[arg(long, default_value_t = 120)]
    days: usize,
    /// Strikes per expiry.
    #[arg(long, default_value_t = 5)]
    strikes: usize,
    /// Expiries in calendar days ahead, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![30, 60, 91])]
    expiries: Vec<u32>,
    /// Calibrate the BS error coefficient so the true noise share equals
    /// this fraction.
    #[arg(long)]
    target_share: Option<f64>,
    /// Planted BS error coefficient (ignored when --target-share is set).
    #[arg(long, default_value_t = 0.0)]
    phi_bs: f64,
    /// Planted BAW error coefficient (ignored when --target-share is set).
    #[arg(long, default_value_t = 0.0)]
    phi_baw: f64,
    /// Lag coefficients of the volume process, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.3, 0.2])]
    ar: Vec<f64>,
    /// Innovation standard deviation of the volume process.
    #[arg(long, default_value_t = 0.1)]
    noise_sd: f64,
    /// Mean of the mid-quote noise around the model price.
    #[arg(long, default_value_t = 0.2)]
    mid_noise_mean: f64,
    #[arg(long, default_value_t = 0.05)]
    mid_noise_sd: f64,
    /// Fraction of rows written with zero volume.
    #[arg(long, default_value_t = 0.0)]
    inactive_fraction: f64,
    /// Trailing-volatility window the analyzing pipeline will use.
    #[arg(long, default_value_t = 21)]
    window: usize,
}

#[derive(Args)]
struct PacfArgs {
    /// Series file: one number per line ('#' lines ignored).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 30)]
    max_lag: usize,
}

#[derive(Args)]
struct AdfArgs {
    /// Series file: one number per line ('#' lines ignored).
    #[arg(long)]
    input: PathBuf,
    /// Difference-lag order of the test regression.
    #[arg(long, default_value_t = 1)]
    lags: usize,
    /// Include the linear trend term.
    #[arg(long, default_value_t = false)]
    trend: bool,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Price(args) => price(args),
        Command::Analyze(args) => analyze(args),
        Command::Synth(args) => synth(args),
        Command::Pacf(args) => pacf_cmd(args),
        Command::Adf(args) => adf_cmd(args),
    }
}

fn price(args: PriceArgs) -> Result<()> {
    let option_type = match args.option_type {
        TypeArg::Call => OptionType::Call,
        TypeArg::Put => OptionType::Put,
    };
    let style = match (args.style, args.model) {
        (Some(StyleArg::European), _) => ExerciseStyle::European,
        (Some(StyleArg::American), _) => ExerciseStyle::American,
        (None, ModelArg::Baw) => ExerciseStyle::American,
        (None, _) => ExerciseStyle::European,
    };
    eprintln!(
        "config: model={:?} type={option_type} style={style} spot={} strike={} rate={} \
         div_yield={} sigma={} tte={} steps={}",
        args.model, args.spot, args.strike, args.rate, args.div_yield, args.sigma, args.tte,
        args.steps
    );

    let spec = OptionContractSpec::new(option_type, style, args.strike, args.tte)?;
    let params = MarketParams::new(args.spot, args.rate, args.div_yield, args.sigma)?;
    match args.model {
        ModelArg::Bs => println!("{:.6}", bs_price(&spec, &params)?),
        ModelArg::Crr => println!("{:.6}", crr_binomial_price(&spec, &params, args.steps)?),
        ModelArg::Baw => {
            println!("{:.6}", baw_price(&spec, &params)?);
            // The b = r call case has no finite boundary and the rate can
            // be too degenerate for the exponents; report what exists.
            match baw_intermediates(&spec, &params) {
                Ok(inter) => {
                    println!("critical_price: {:.6}", inter.critical_price);
                    println!("iterations: {}", inter.iterations_used);
                }
                Err(_) => println!("critical_price: n/a (no early-exercise premium)"),
            }
        }
    }
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let mut config: PipelineConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?
        }
        None => PipelineConfig::default(),
    };
    if let Some(v) = args.options {
        config.options = v;
    }
    if let Some(v) = args.treasury {
        config.treasury = v;
    }
    if let Some(v) = args.closes {
        config.closes = v;
    }
    if let Some(v) = args.volatility_window {
        config.volatility_window = v;
    }
    if let Some(v) = args.outlier_threshold {
        config.outlier_threshold = v;
    }
    if let Some(v) = args.lag_mode {
        config.lag_mode = v;
    }
    if let Some(v) = args.ar_order {
        config.ar_order = v;
    }
    if let Some(v) = args.models {
        config.models = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    for (canonical, actual) in args.renames {
        config.schema.rename.insert(canonical, actual);
    }
    if config.options.as_os_str().is_empty()
        || config.treasury.as_os_str().is_empty()
        || config.closes.as_os_str().is_empty()
    {
        bail!("analyze needs --options, --treasury, and --closes (flags or config file)");
    }

    eprintln!(
        "config: {}",
        toml::to_string(&config).unwrap_or_else(|_| "<unprintable>".into()).replace('\n', " ")
    );

    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    let report = run_analysis(&config)?;
    let sinks = ReportSinks::in_dir(&args.out_dir);
    emit_report(&report, &sinks)?;
    eprintln!("stage counts: {:?}", report.manifest.pricing_skip_reasons);

    if let Some(path) = args.errors_out {
        // Rebuild is cheap relative to a separate artifact format; reuse
        // the dataset to persist the per-row errors.
        let built = optnoise_core::pipeline::build_dataset(&config)?;
        let file = fs::File::create(&path)
            .with_context(|| format!("creating {}", path.display()))?;
        write_error_records(&built.error_records, std::io::BufWriter::new(file))
            .with_context(|| format!("writing {}", path.display()))?;
        println!("errors: {}", path.display());
    }

    println!("report: {}", sinks.table.display());
    println!("machine: {}", sinks.machine.display());
    println!("volume plot: {}", sinks.volume_plot.display());
    println!("pacf plot: {}", sinks.pacf_plot.display());
    if let Some(share) = report.noise_share {
        println!(
            "noise share: {:.2}% [{:.2}%, {:.2}%]",
            100.0 * share.point,
            100.0 * share.low,
            100.0 * share.high
        );
    }
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let config = SynthConfig {
        seed: args.seed,
        trade_days: args.days,
        strikes_per_expiry: args.strikes,
        expiry_days: args.expiries,
        mid_noise_mean: args.mid_noise_mean,
        mid_noise_sd: args.mid_noise_sd,
        inactive_fraction: args.inactive_fraction,
        volatility_window: args.window,
        planted: PlantedVolumeModel {
            phi_bs: args.phi_bs,
            phi_baw: args.phi_baw,
            ar: args.ar,
            noise_sd: args.noise_sd,
            ..PlantedVolumeModel::default()
        },
        target_noise_share: args.target_share,
        ..SynthConfig::default()
    };
    eprintln!(
        "config: seed={} days={} strikes={} expiries={:?} target_share={:?} phi_bs={} \
         phi_baw={} ar={:?} noise_sd={} inactive={}",
        config.seed,
        config.trade_days,
        config.strikes_per_expiry,
        config.expiry_days,
        config.target_noise_share,
        config.planted.phi_bs,
        config.planted.phi_baw,
        config.planted.ar,
        config.planted.noise_sd,
        config.inactive_fraction
    );
    let (files, truth) = synthesize_market(&config, &args.out_dir)?;
    println!("options: {}", files.options.display());
    println!("treasury: {}", files.treasury.display());
    println!("closes: {}", files.closes.display());
    println!(
        "truth: phi_bs={} phi_baw={} share={:.6} mean_x_bs={:.6} mean_x_baw={:.6} \
         rows={} active={} rng={}",
        truth.phi_bs,
        truth.phi_baw,
        truth.true_noise_share,
        truth.mean_x_bs,
        truth.mean_x_baw,
        truth.rows_written,
        truth.active_rows,
        truth.rng_algorithm
    );
    Ok(())
}

fn load_series(path: &PathBuf) -> Result<Vec<f64>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut series = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let value: f64 = trimmed
            .parse()
            .with_context(|| format!("{}:{}: not a number: '{trimmed}'", path.display(), i + 1))?;
        series.push(value);
    }
    Ok(series)
}

fn pacf_cmd(args: PacfArgs) -> Result<()> {
    eprintln!("config: input={} max_lag={}", args.input.display(), args.max_lag);
    let series = load_series(&args.input)?;
    let result = pacf(&series, args.max_lag)?;
    println!("n: {}", series.len());
    println!("significance bound: ±{:.6}", result.significance_bound);
    for (i, value) in result.values.iter().enumerate() {
        let mark = if value.abs() > result.significance_bound { " *" } else { "" };
        println!("lag {:>3}: {value:>10.6}{mark}", i + 1);
    }
    println!("selected order: {}", select_ar_order(&result));
    Ok(())
}

fn adf_cmd(args: AdfArgs) -> Result<()> {
    eprintln!(
        "config: input={} lags={} trend={}",
        args.input.display(),
        args.lags,
        args.trend
    );
    let series = load_series(&args.input)?;
    let result = adf_test(&series, args.lags, args.trend)?;
    println!("statistic: {:.6}", result.statistic);
    println!("lag order: {}", result.lag_order);
    println!("effective n: {}", result.effective_n);
    println!("p bound: {}", result.p_bound);
    println!(
        "unit root rejected at 5%: {}",
        if result.reject_unit_root_at_5pct { "yes (stationary)" } else { "no" }
    );
    Ok(())
}

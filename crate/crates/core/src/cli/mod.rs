//! `indexsim` command line.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 I/O error.

mod config;

pub use config::{EffectiveRun, ModelSettings, RunConfig, DEFAULT_OUTPUT, DEFAULT_SEED, SEED_ENV};

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analytic::{calibrate, AnalyticSummary, CalibrationTarget};
use crate::enumerate::{
    enumerate_portfolios_with_cap, for_each_portfolio, DeterministicIndex, DEFAULT_CAP,
};
use crate::error::{Error, Result};
use crate::montecarlo::{run_experiment, FrequencyReport};
use crate::report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "indexsim",
    version,
    about = "Random stock selection versus the index in a drift-mixture GBM market"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Back out mu_hat and sigma_hat from median and expected returns.
    Calibrate(CalibrateArgs),
    /// Print the closed-form index expectation, median stock and log law.
    Analytic(AnalyticArgs),
    /// Enumerate every 1- and 2-stock portfolio of the five-stock example.
    Demo(DemoArgs),
    /// Enumerate all equal-weighted portfolios of a fixed list of gross values.
    Enumerate(EnumerateArgs),
    /// Run the Monte Carlo frequency experiment and write CSV (and SVG).
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    /// Net return of the median stock over the horizon.
    #[arg(long, allow_hyphen_values = true)]
    median: f64,
    /// Net expected index return over the horizon.
    #[arg(long, allow_hyphen_values = true)]
    expected: f64,
    #[arg(long)]
    sigma: f64,
    /// Horizon in years.
    #[arg(long)]
    horizon: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Use the 500-stock, five-year, 10%/50% calibration (the default).
    #[arg(long)]
    paper_defaults: bool,
    #[arg(long)]
    n_stocks: Option<usize>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu_hat: Option<f64>,
    #[arg(long)]
    sigma_hat: Option<f64>,
    /// Median net return to calibrate against (when mu_hat/sigma_hat are unset).
    #[arg(long, allow_hyphen_values = true)]
    median: Option<f64>,
    /// Expected net index return to calibrate against.
    #[arg(long, allow_hyphen_values = true)]
    expected: Option<f64>,
}

impl ModelArgs {
    fn settings(&self) -> ModelSettings {
        ModelSettings {
            n_stocks: self.n_stocks,
            horizon: self.horizon,
            sigma: self.sigma,
            mu_hat: self.mu_hat,
            sigma_hat: self.sigma_hat,
            median_return: self.median,
            expected_return: self.expected,
        }
    }
}

#[derive(Debug, Args)]
struct AnalyticArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct DemoArgs {
    /// Net benchmark return; defaults to the index return.
    #[arg(long, allow_hyphen_values = true)]
    benchmark: Option<f64>,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    /// Comma-separated gross values, e.g. 1.1,1.1,1.5.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    /// Comma-separated portfolio sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Net benchmark returns; defaults to the index return.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    benchmark: Vec<f64>,
    /// Maximum number of portfolios to enumerate.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Flat `key = value` configuration file.
    #[arg(long, conflicts_with = "paper_defaults")]
    config: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated portfolio sizes.
    #[arg(long)]
    sizes: Option<String>,
    /// Trials per portfolio size.
    #[arg(long)]
    trials: Option<u64>,
    /// Benchmark pairs `over:under`, comma-separated.
    #[arg(long)]
    benchmarks: Option<String>,
    /// fixed-benchmark | realized-index
    #[arg(long)]
    mode: Option<String>,
    /// fresh-universe | direct-iid
    #[arg(long)]
    sampling: Option<String>,
    /// Master seed (overrides the config file and INDEXSIM_SEED).
    #[arg(long)]
    seed: Option<u64>,
    /// Confidence level of the Wilson intervals.
    #[arg(long)]
    confidence: Option<f64>,
    /// Decimal places in the CSV, or `full`.
    #[arg(long)]
    precision: Option<String>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG chart here.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    threads: Option<usize>,
}

impl SimulateArgs {
    fn flags(&self) -> Result<RunConfig> {
        fn wrap<T>(r: std::result::Result<T, String>) -> Result<T> {
            r.map_err(Error::Config)
        }
        Ok(RunConfig {
            model: self.model.settings(),
            sizes: wrap(self.sizes.as_deref().map(config::parse_sizes).transpose())?,
            trials: self.trials,
            benchmarks: wrap(
                self.benchmarks
                    .as_deref()
                    .map(config::parse_benchmarks)
                    .transpose(),
            )?,
            mode: wrap(self.mode.as_deref().map(config::parse_mode).transpose())?,
            sampling: wrap(
                self.sampling
                    .as_deref()
                    .map(config::parse_sampling)
                    .transpose(),
            )?,
            seed: self.seed,
            confidence: self.confidence,
            precision: wrap(
                self.precision
                    .as_deref()
                    .map(config::parse_precision)
                    .transpose(),
            )?,
            output: self.out.clone(),
            svg: self.svg.clone(),
            threads: self.threads,
        })
    }
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    let env_seed = std::env::var(SEED_ENV).ok();
    run(std::env::args_os(), env_seed.as_deref())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, env_seed: Option<&str>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Calibrate(args) => cmd_calibrate(&args),
        Command::Analytic(args) => cmd_analytic(&args),
        Command::Demo(args) => cmd_demo(&args),
        Command::Enumerate(args) => cmd_enumerate(&args),
        Command::Simulate(args) => cmd_simulate(&args, env_seed),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io { .. } => EXIT_IO,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn cmd_calibrate(args: &CalibrateArgs) -> Result<()> {
    let c = calibrate(&CalibrationTarget {
        median_return: args.median,
        expected_return: args.expected,
        sigma: args.sigma,
        horizon: args.horizon,
    })?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&c).expect("serializable")
        );
    } else {
        println!(
            "mu_hat={:.6} (exact {}, rounded {}%)",
            c.mu_hat,
            c.mu_hat,
            (c.mu_hat * 100.0).round()
        );
        println!(
            "sigma_hat={:.6} (exact {}, rounded {}%)",
            c.sigma_hat,
            c.sigma_hat,
            (c.sigma_hat * 100.0).round()
        );
    }
    Ok(())
}

fn cmd_analytic(args: &AnalyticArgs) -> Result<()> {
    let settings = if args.model.paper_defaults {
        ModelSettings::default()
    } else {
        args.model.settings()
    };
    let params = settings.resolve()?;
    let summary = AnalyticSummary::new(&params)?;
    if args.json {
        let value = serde_json::json!({ "params": params, "summary": summary });
        println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("serializable")
        );
    } else {
        println!(
            "params n_stocks={} horizon={} sigma={} mu_hat={} sigma_hat={}",
            params.n_stocks, params.horizon, params.sigma, params.mu_hat, params.sigma_hat
        );
        println!("expected_index_value={:.6}", summary.expected_index_value);
        println!("median_stock_value={:.6}", summary.median_stock_value);
        println!(
            "underperformance_factor={:.6}",
            summary.underperformance_factor
        );
        println!("log_mean={:.6}", summary.log_mean);
        println!("log_variance={:.6}", summary.log_variance);
    }
    Ok(())
}

fn print_enumeration(
    index: &DeterministicIndex,
    sizes: &[usize],
    benchmarks: &[f64],
    cap: u64,
    list: bool,
) -> Result<()> {
    if list {
        println!("{:>4}  {:<16} {:>10}", "k", "members", "return");
        for_each_portfolio(index, sizes, cap, |members, r| {
            let names: Vec<String> = members.iter().map(|i| i.to_string()).collect();
            println!(
                "{:>4}  {:<16} {:>10.6}",
                members.len(),
                format!("[{}]", names.join(",")),
                r
            );
        })?;
    }
    let stats = enumerate_portfolios_with_cap(index, sizes, benchmarks, cap)?;
    if !list {
        for (r, count) in &stats.histogram {
            println!("return={r:.6} count={count}");
        }
    }
    for c in &stats.comparisons {
        println!(
            "benchmark={:.6} below={} equal={} above={}",
            c.benchmark, c.below, c.equal, c.above
        );
    }
    let under = stats
        .comparisons
        .first()
        .map_or(0.0, |c| c.below_fraction());
    println!(
        "portfolios={} mean={:.6} median={:.6} under_fraction={:.6}",
        stats.portfolio_count, stats.mean_return, stats.median_return, under
    );
    Ok(())
}

fn cmd_demo(args: &DemoArgs) -> Result<()> {
    let index = DeterministicIndex::five_stock_example();
    println!(
        "index gross values: 1.1 1.1 1.1 1.1 1.5 (index return {:.6})",
        index.index_return()
    );
    let benchmark = args.benchmark.unwrap_or_else(|| index.index_return());
    print_enumeration(&index, &[1, 2], &[benchmark], DEFAULT_CAP, true)
}

fn cmd_enumerate(args: &EnumerateArgs) -> Result<()> {
    let index = DeterministicIndex::new(args.values.clone())?;
    let benchmarks = if args.benchmark.is_empty() {
        vec![index.index_return()]
    } else {
        args.benchmark.clone()
    };
    print_enumeration(&index, &args.sizes, &benchmarks, args.cap, false)
}

fn read_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RunConfig::parse_file(&text)
}

/// Sidecar holding the effective configuration of a CSV output.
pub fn echo_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".cfg");
    PathBuf::from(name)
}

fn cmd_simulate(args: &SimulateArgs, env_seed: Option<&str>) -> Result<()> {
    let mut config = RunConfig::from_env_value(env_seed)?;
    if let Some(path) = &args.config {
        config.overlay(&read_config(path)?);
    }
    let mut flags = args.flags()?;
    if args.model.paper_defaults {
        // The preset pins the model; everything else can still be overridden.
        flags.model = ModelSettings::default();
    }
    config.overlay(&flags);
    let run = config.resolve()?;

    let report = execute(&run)?;
    report::write_csv_file(&report, run.precision, &run.output)?;
    let echo = run.echo();
    let echo_file = echo_path(&run.output);
    fs::write(&echo_file, &echo).map_err(|e| Error::io(&echo_file, e))?;
    if let Some(svg) = &run.svg {
        report::write_svg_file(&report, svg)?;
    }

    print!("{echo}");
    for row in &report.rows {
        println!(
            "k={:<4} over>{:.2}: {:.4} ±{:.4}  under<{:.2}: {:.4} ±{:.4}",
            row.k,
            row.benchmark.over,
            row.over_freq(),
            row.over_ci.half_width,
            row.benchmark.under,
            row.under_freq(),
            row.under_ci.half_width
        );
    }
    println!("wrote {}", run.output.display());
    Ok(())
}

/// Runs the experiment, on a dedicated pool when a thread count is set.
pub fn execute(run: &EffectiveRun) -> Result<FrequencyReport> {
    match run.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} threads: {e}")))?
            .install(|| run_experiment(&run.experiment)),
        None => run_experiment(&run.experiment),
    }
}

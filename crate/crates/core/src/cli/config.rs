//! Layered run configuration for `simulate`.
//!
//! Precedence, lowest first: built-in defaults (the `--paper-defaults` preset),
//! `INDEXSIM_SEED`, the config file, command-line flags. The config file is
//! flat `key = value` text; `#` starts a comment.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::analytic::{calibrate, CalibrationTarget};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::montecarlo::{BenchmarkMode, BenchmarkPair, ExperimentConfig, Sampling, DEFAULT_SIZES};
use crate::report::Precision;

pub const SEED_ENV: &str = "INDEXSIM_SEED";
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_OUTPUT: &str = "frequencies.csv";

/// Model constants, either given directly or backed out of target returns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelSettings {
    pub n_stocks: Option<usize>,
    pub horizon: Option<f64>,
    pub sigma: Option<f64>,
    pub mu_hat: Option<f64>,
    pub sigma_hat: Option<f64>,
    pub median_return: Option<f64>,
    pub expected_return: Option<f64>,
}

impl ModelSettings {
    fn overlay(&mut self, top: &ModelSettings) {
        overlay(&mut self.n_stocks, top.n_stocks);
        overlay(&mut self.horizon, top.horizon);
        overlay(&mut self.sigma, top.sigma);
        overlay(&mut self.mu_hat, top.mu_hat);
        overlay(&mut self.sigma_hat, top.sigma_hat);
        overlay(&mut self.median_return, top.median_return);
        overlay(&mut self.expected_return, top.expected_return);
    }

    /// Explicit `mu_hat`/`sigma_hat` win; otherwise both are calibrated from
    /// the target returns. Unset values take the default preset.
    pub fn resolve(&self) -> Result<ModelParams> {
        let paper = CalibrationTarget::paper();
        let n_stocks = self.n_stocks.unwrap_or(500);
        let horizon = self.horizon.unwrap_or(paper.horizon);
        let sigma = self.sigma.unwrap_or(paper.sigma);
        let (mu_hat, sigma_hat) = match (self.mu_hat, self.sigma_hat) {
            (Some(m), Some(s)) => (m, s),
            (None, None) => {
                let c = calibrate(&CalibrationTarget {
                    median_return: self.median_return.unwrap_or(paper.median_return),
                    expected_return: self.expected_return.unwrap_or(paper.expected_return),
                    sigma,
                    horizon,
                })?;
                (c.mu_hat, c.sigma_hat)
            }
            _ => {
                return Err(Error::Config(
                    "mu_hat and sigma_hat must be given together".into(),
                ))
            }
        };
        ModelParams::new(n_stocks, horizon, sigma, mu_hat, sigma_hat)
    }
}

fn overlay<T: Clone>(base: &mut Option<T>, top: Option<T>) {
    if top.is_some() {
        *base = top;
    }
}

/// Everything `simulate` needs; unset fields fall back to defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub model: ModelSettings,
    pub sizes: Option<Vec<usize>>,
    pub trials: Option<u64>,
    pub benchmarks: Option<Vec<BenchmarkPair>>,
    pub mode: Option<BenchmarkMode>,
    pub sampling: Option<Sampling>,
    pub seed: Option<u64>,
    pub confidence: Option<f64>,
    pub precision: Option<Precision>,
    pub output: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub threads: Option<usize>,
}

/// Fully resolved `simulate` settings.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveRun {
    pub experiment: ExperimentConfig,
    pub precision: Precision,
    pub output: PathBuf,
    pub svg: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    /// Applies `top` over `self`: every field set in `top` wins.
    pub fn overlay(&mut self, top: &RunConfig) {
        self.model.overlay(&top.model);
        overlay(&mut self.sizes, top.sizes.clone());
        overlay(&mut self.trials, top.trials);
        overlay(&mut self.benchmarks, top.benchmarks.clone());
        overlay(&mut self.mode, top.mode);
        overlay(&mut self.sampling, top.sampling);
        overlay(&mut self.seed, top.seed);
        overlay(&mut self.confidence, top.confidence);
        overlay(&mut self.precision, top.precision);
        overlay(&mut self.output, top.output.clone());
        overlay(&mut self.svg, top.svg.clone());
        overlay(&mut self.threads, top.threads);
    }

    /// Seed from `INDEXSIM_SEED`, if set.
    pub fn from_env_value(value: Option<&str>) -> Result<RunConfig> {
        let seed = value
            .map(|v| {
                v.trim().parse::<u64>().map_err(|_| {
                    Error::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer"))
                })
            })
            .transpose()?;
        Ok(RunConfig {
            seed,
            ..RunConfig::default()
        })
    }

    pub fn parse_file(text: &str) -> Result<RunConfig> {
        let mut config = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            config
                .set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(config)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let m = &mut self.model;
        match key {
            "n_stocks" => m.n_stocks = Some(parse_num(key, value)?),
            "horizon" => m.horizon = Some(parse_num(key, value)?),
            "sigma" => m.sigma = Some(parse_num(key, value)?),
            "mu_hat" => m.mu_hat = Some(parse_num(key, value)?),
            "sigma_hat" => m.sigma_hat = Some(parse_num(key, value)?),
            "median_return" => m.median_return = Some(parse_num(key, value)?),
            "expected_return" => m.expected_return = Some(parse_num(key, value)?),
            "sizes" => self.sizes = Some(parse_sizes(value)?),
            "trials" => self.trials = Some(parse_num(key, value)?),
            "benchmarks" => self.benchmarks = Some(parse_benchmarks(value)?),
            "mode" => self.mode = Some(parse_mode(value)?),
            "sampling" => self.sampling = Some(parse_sampling(value)?),
            "seed" => self.seed = Some(parse_num(key, value)?),
            "confidence" => self.confidence = Some(parse_num(key, value)?),
            "precision" => self.precision = Some(parse_precision(value)?),
            "output" => self.output = Some(PathBuf::from(value)),
            "svg" => self.svg = Some(PathBuf::from(value)),
            "threads" => self.threads = Some(parse_num(key, value)?),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn resolve(&self) -> Result<EffectiveRun> {
        let experiment = ExperimentConfig {
            params: self.model.resolve()?,
            sizes: self.sizes.clone().unwrap_or_else(|| DEFAULT_SIZES.to_vec()),
            trials_per_size: self.trials.unwrap_or(10_000),
            benchmarks: self.benchmarks.clone().unwrap_or_else(|| {
                vec![
                    BenchmarkPair::new(0.50, 0.50),
                    BenchmarkPair::new(0.70, 0.30),
                ]
            }),
            mode: self.mode.unwrap_or_default(),
            sampling: self.sampling.unwrap_or_default(),
            master_seed: self.seed.unwrap_or(DEFAULT_SEED),
            confidence: self.confidence.unwrap_or(0.95),
        };
        experiment.validate()?;
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(EffectiveRun {
            experiment,
            precision: self.precision.unwrap_or_default(),
            output: self
                .output
                .clone()
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT)),
            svg: self.svg.clone(),
            threads: self.threads,
        })
    }
}

impl EffectiveRun {
    /// Config-file text that reproduces this run. Thread count is omitted
    /// since it does not affect results.
    pub fn echo(&self) -> String {
        let e = &self.experiment;
        let p = &e.params;
        let mut out = String::from("# indexsim simulate, effective configuration\n");
        let join = |v: Vec<String>| v.join(", ");
        let _ = writeln!(out, "n_stocks = {}", p.n_stocks);
        let _ = writeln!(out, "horizon = {}", p.horizon);
        let _ = writeln!(out, "sigma = {}", p.sigma);
        let _ = writeln!(out, "mu_hat = {}", p.mu_hat);
        let _ = writeln!(out, "sigma_hat = {}", p.sigma_hat);
        let _ = writeln!(
            out,
            "sizes = {}",
            join(e.sizes.iter().map(|k| k.to_string()).collect())
        );
        let _ = writeln!(out, "trials = {}", e.trials_per_size);
        let _ = writeln!(
            out,
            "benchmarks = {}",
            join(
                e.benchmarks
                    .iter()
                    .map(|b| format!("{}:{}", b.over, b.under))
                    .collect()
            )
        );
        let _ = writeln!(out, "mode = {}", mode_name(e.mode));
        let _ = writeln!(out, "sampling = {}", sampling_name(e.sampling));
        let _ = writeln!(out, "seed = {}", e.master_seed);
        let _ = writeln!(out, "confidence = {}", e.confidence);
        let precision = match self.precision {
            Precision::Fixed(n) => n.to_string(),
            Precision::Full => "full".into(),
        };
        let _ = writeln!(out, "precision = {precision}");
        let _ = writeln!(out, "output = {}", self.output.display());
        if let Some(svg) = &self.svg {
            let _ = writeln!(out, "svg = {}", svg.display());
        }
        out
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value
        .parse::<T>()
        .map_err(|_| format!("`{value}` is not a valid value for `{key}`"))
}

pub fn parse_sizes(value: &str) -> std::result::Result<Vec<usize>, String> {
    value
        .split(',')
        .map(|s| parse_num::<usize>("sizes", s.trim()))
        .collect()
}

/// `over:under` pairs separated by commas, e.g. `0.5:0.5, 0.7:0.3`.
pub fn parse_benchmarks(value: &str) -> std::result::Result<Vec<BenchmarkPair>, String> {
    value
        .split(',')
        .map(|pair| {
            let (over, under) = pair
                .trim()
                .split_once(':')
                .ok_or_else(|| format!("benchmark `{}` is not `over:under`", pair.trim()))?;
            Ok(BenchmarkPair::new(
                parse_num("benchmarks", over.trim())?,
                parse_num("benchmarks", under.trim())?,
            ))
        })
        .collect()
}

pub fn parse_mode(value: &str) -> std::result::Result<BenchmarkMode, String> {
    match value {
        "fixed-benchmark" | "fixed" => Ok(BenchmarkMode::FixedBenchmark),
        "realized-index" | "realized" => Ok(BenchmarkMode::RealizedIndex),
        _ => Err(format!(
            "unknown mode `{value}` (fixed-benchmark | realized-index)"
        )),
    }
}

pub fn parse_sampling(value: &str) -> std::result::Result<Sampling, String> {
    match value {
        "fresh-universe" | "fresh" => Ok(Sampling::FreshUniverse),
        "direct-iid" | "iid" => Ok(Sampling::DirectIid),
        _ => Err(format!(
            "unknown sampling `{value}` (fresh-universe | direct-iid)"
        )),
    }
}

pub fn parse_precision(value: &str) -> std::result::Result<Precision, String> {
    if value == "full" {
        return Ok(Precision::Full);
    }
    match value.parse::<usize>() {
        Ok(n) if n <= 17 => Ok(Precision::Fixed(n)),
        _ => Err(format!("precision must be 0..=17 or `full`, got `{value}`")),
    }
}

fn mode_name(mode: BenchmarkMode) -> &'static str {
    match mode {
        BenchmarkMode::FixedBenchmark => "fixed-benchmark",
        BenchmarkMode::RealizedIndex => "realized-index",
    }
}

fn sampling_name(sampling: Sampling) -> &'static str {
    match sampling {
        Sampling::FreshUniverse => "fresh-universe",
        Sampling::DirectIid => "direct-iid",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_paper_preset() {
        let run = RunConfig::default().resolve().unwrap();
        assert_eq!(run.experiment, ExperimentConfig::paper());
        assert_eq!(run.precision, Precision::Fixed(6));
    }

    #[test]
    fn file_parsing_and_comments() {
        let cfg = RunConfig::parse_file(
            "# comment\n\nn_stocks = 50  # inline\nsizes = 1, 5,10\nbenchmarks = 0.5:0.5,0.7:0.3\nmode = realized-index\nprecision = full\n",
        )
        .unwrap();
        assert_eq!(cfg.model.n_stocks, Some(50));
        assert_eq!(cfg.sizes, Some(vec![1, 5, 10]));
        assert_eq!(
            cfg.benchmarks.as_ref().unwrap()[1],
            BenchmarkPair::new(0.7, 0.3)
        );
        assert_eq!(cfg.mode, Some(BenchmarkMode::RealizedIndex));
        assert_eq!(cfg.precision, Some(Precision::Full));

        assert!(RunConfig::parse_file("bogus = 1").is_err());
        assert!(RunConfig::parse_file("n_stocks").is_err());
        assert!(RunConfig::parse_file("trials = many").is_err());
        assert!(RunConfig::parse_file("benchmarks = 0.5").is_err());
    }

    #[test]
    fn layers_override_in_order() {
        let mut cfg = RunConfig::from_env_value(Some("7")).unwrap();
        cfg.overlay(&RunConfig::parse_file("seed = 8\ntrials = 20").unwrap());
        assert_eq!((cfg.seed, cfg.trials), (Some(8), Some(20)));
        cfg.overlay(&RunConfig {
            seed: Some(9),
            ..RunConfig::default()
        });
        assert_eq!((cfg.seed, cfg.trials), (Some(9), Some(20)));
        assert!(RunConfig::from_env_value(Some("x")).is_err());
    }

    #[test]
    fn echo_reproduces_the_run() {
        let mut cfg =
            RunConfig::parse_file("n_stocks = 30\nsizes = 1,3\nsigma = 0.25\nsvg = chart.svg")
                .unwrap();
        cfg.threads = Some(3);
        let run = cfg.resolve().unwrap();
        let again = RunConfig::parse_file(&run.echo())
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(again.experiment, run.experiment);
        assert_eq!(again.svg, run.svg);
        assert_eq!(again.threads, None);
    }

    #[test]
    fn half_specified_drift_mixture_is_rejected() {
        let cfg = RunConfig::parse_file("mu_hat = 0.04").unwrap();
        assert!(matches!(cfg.resolve(), Err(Error::Config(_))));
    }
}

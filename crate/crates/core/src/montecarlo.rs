//! Over/under-performance frequencies of random equal-weighted sub-portfolios.
//!
//! For every portfolio size `k`, each trial draws stocks, picks `k` of them
//! uniformly without replacement (partial Fisher-Yates), and compares the
//! equal-weighted gross value against every benchmark pair. Trial `t` of
//! size `k` reads only the substreams of trial id `(k << 32) | t`, so a cell
//! is reproducible on its own and independent of the thread count. The
//! tally is an integer sum, which makes the reduction order irrelevant.
//!
//! All benchmark pairs of one size are scored on the same trials.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{expected_index_value, paper_params};
use crate::error::{Error, Result};
use crate::model::{fill_members, fill_universe, sorted_subset_gross, ModelParams};
use crate::normal;
use crate::rng::{Purpose, SeedSpec, Substream};
use crate::sum::corrected_mean;

/// Portfolio-size grid for the frequency figure.
pub const DEFAULT_SIZES: [usize; 13] = [1, 2, 5, 10, 15, 20, 30, 50, 75, 100, 150, 250, 500];

const MAX_TRIALS: u64 = u32::MAX as u64;
const MAX_SIZE: usize = 1 << 30;

/// Net-return thresholds: a portfolio overperforms above `over` and
/// underperforms below `under`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkPair {
    pub over: f64,
    pub under: f64,
}

impl BenchmarkPair {
    pub fn new(over: f64, under: f64) -> Self {
        Self { over, under }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchmarkMode {
    /// Thresholds are fixed net returns.
    #[default]
    FixedBenchmark,
    /// Thresholds are rescaled by `I_realized / E[I]` of each trial's universe.
    RealizedIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// Draw all `N` stocks every trial and choose `k` of them.
    #[default]
    FreshUniverse,
    /// Draw only `k` i.i.d. stocks (same marginal law, no realized index).
    DirectIid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub sizes: Vec<usize>,
    pub trials_per_size: u64,
    pub benchmarks: Vec<BenchmarkPair>,
    pub mode: BenchmarkMode,
    pub sampling: Sampling,
    pub master_seed: u64,
    /// Confidence level of the reported Wilson intervals.
    pub confidence: f64,
}

impl ExperimentConfig {
    /// 500 calibrated stocks, 10,000 trials per size, 50%/50% and 70%/30%.
    pub fn paper() -> Self {
        Self {
            params: paper_params(),
            sizes: DEFAULT_SIZES.to_vec(),
            trials_per_size: 10_000,
            benchmarks: vec![
                BenchmarkPair::new(0.50, 0.50),
                BenchmarkPair::new(0.70, 0.30),
            ],
            mode: BenchmarkMode::FixedBenchmark,
            sampling: Sampling::FreshUniverse,
            master_seed: 42,
            confidence: 0.95,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let n = self.params.n_stocks;
        if self.sizes.is_empty() {
            return Err(Error::Config("no portfolio sizes".into()));
        }
        if let Some(k) = self
            .sizes
            .iter()
            .find(|&&k| k == 0 || k > n || k >= MAX_SIZE)
        {
            return Err(Error::Config(format!("portfolio size {k} outside 1..={n}")));
        }
        if self.trials_per_size == 0 || self.trials_per_size > MAX_TRIALS {
            return Err(Error::Config(format!(
                "trials_per_size must be in 1..={MAX_TRIALS}, got {}",
                self.trials_per_size
            )));
        }
        if self.benchmarks.is_empty() {
            return Err(Error::Config("no benchmark pairs".into()));
        }
        for b in &self.benchmarks {
            if !(b.over.is_finite() && b.under.is_finite()) || b.over <= -1.0 || b.under <= -1.0 {
                return Err(Error::Config(format!(
                    "benchmark ({}, {}) must be finite and > -1",
                    b.over, b.under
                )));
            }
            if b.over < b.under {
                return Err(Error::Config(format!(
                    "over threshold {} is below under threshold {}",
                    b.over, b.under
                )));
            }
        }
        check_mode(self.mode, self.sampling)?;
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::Config(format!(
                "confidence must be in (0, 1), got {}",
                self.confidence
            )));
        }
        Ok(())
    }
}

fn check_mode(mode: BenchmarkMode, sampling: Sampling) -> Result<()> {
    if mode == BenchmarkMode::RealizedIndex && sampling == Sampling::DirectIid {
        return Err(Error::Config(
            "realized-index mode needs fresh-universe sampling".into(),
        ));
    }
    Ok(())
}

/// Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilsonInterval {
    pub center: f64,
    pub half_width: f64,
    /// `center - half_width`, clamped to [0, 1]; exactly 0 with no successes.
    pub lower: f64,
    /// `center + half_width`, clamped to [0, 1]; exactly 1 with no failures.
    pub upper: f64,
}

/// Wilson score interval for `successes` out of `trials` at `confidence`.
pub fn frequency_ci(successes: u64, trials: u64, confidence: f64) -> Result<WilsonInterval> {
    if trials == 0 || successes > trials {
        return Err(Error::Input(format!(
            "{successes} successes out of {trials} trials"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Input(format!(
            "confidence must be in (0, 1), got {confidence}"
        )));
    }
    let z = normal::inverse_cdf(0.5 + 0.5 * confidence);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half_width = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lower = if successes == 0 {
        0.0
    } else {
        (center - half_width).max(0.0)
    };
    let upper = if successes == trials {
        1.0
    } else {
        (center + half_width).min(1.0)
    };
    Ok(WilsonInterval {
        center,
        half_width,
        lower,
        upper,
    })
}

/// One (size, benchmark) cell of the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRow {
    pub k: usize,
    pub benchmark: BenchmarkPair,
    pub over_count: u64,
    pub under_count: u64,
    /// Neither over nor under; for an `(x, x)` pair only exact ties.
    pub between_count: u64,
    pub trials: u64,
    pub over_ci: WilsonInterval,
    pub under_ci: WilsonInterval,
}

impl FrequencyRow {
    fn from_counts(
        k: usize,
        benchmark: BenchmarkPair,
        over: u64,
        under: u64,
        trials: u64,
        confidence: f64,
    ) -> Result<Self> {
        Ok(Self {
            k,
            benchmark,
            over_count: over,
            under_count: under,
            between_count: trials - over - under,
            trials,
            over_ci: frequency_ci(over, trials, confidence)?,
            under_ci: frequency_ci(under, trials, confidence)?,
        })
    }

    pub fn over_freq(&self) -> f64 {
        self.over_count as f64 / self.trials as f64
    }

    pub fn under_freq(&self) -> f64 {
        self.under_count as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyReport {
    pub config: ExperimentConfig,
    /// Sorted by `(k, over, under)`.
    pub rows: Vec<FrequencyRow>,
}

/// Result of a single trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub portfolio_return: f64,
    /// Realized index net return; fresh-universe sampling only.
    pub index_return: Option<f64>,
}

#[derive(Default)]
struct Scratch {
    drifts: Vec<f64>,
    values: Vec<f64>,
    order: Vec<usize>,
}

/// Partial Fisher-Yates: leaves a uniform k-subset, sorted, in `order[..k]`.
fn select(order: &mut Vec<usize>, n: usize, k: usize, stream: &mut Substream) {
    order.clear();
    order.extend(0..n);
    for i in 0..k {
        let j = stream.index(i, n);
        order.swap(i, j);
    }
    order[..k].sort_unstable();
}

/// Gross portfolio value and, if requested, the realized gross index level.
fn trial_gross(
    params: &ModelParams,
    k: usize,
    seed: SeedSpec,
    sampling: Sampling,
    want_index: bool,
    scratch: &mut Scratch,
) -> (f64, Option<f64>) {
    match sampling {
        Sampling::FreshUniverse => {
            let n = params.n_stocks;
            let mut selection = seed.purpose(Purpose::Selection).stream();
            select(&mut scratch.order, n, k, &mut selection);
            if want_index {
                fill_universe(params, n, seed, &mut scratch.drifts, &mut scratch.values);
                let gross = sorted_subset_gross(&scratch.values, &scratch.order[..k]);
                (gross, Some(corrected_mean(scratch.values.iter().copied())))
            } else {
                // Same values as the full draw, evaluated for the members only.
                fill_members(params, seed, &scratch.order[..k], &mut scratch.values);
                (corrected_mean(scratch.values.iter().copied()), None)
            }
        }
        Sampling::DirectIid => {
            fill_universe(params, k, seed, &mut scratch.drifts, &mut scratch.values);
            (corrected_mean(scratch.values.iter().copied()), None)
        }
    }
}

/// One trial: an equal-weighted k-stock portfolio and, under fresh-universe
/// sampling, the realized index it was drawn from.
pub fn run_trial(
    params: &ModelParams,
    k: usize,
    seed: SeedSpec,
    mode: BenchmarkMode,
    sampling: Sampling,
) -> Result<TrialOutcome> {
    params.validate()?;
    check_mode(mode, sampling)?;
    if k == 0 || k > params.n_stocks {
        return Err(Error::Input(format!(
            "portfolio size {k} outside 1..={}",
            params.n_stocks
        )));
    }
    let mut scratch = Scratch::default();
    let want_index = sampling == Sampling::FreshUniverse;
    let (gross, index) = trial_gross(params, k, seed, sampling, want_index, &mut scratch);
    Ok(TrialOutcome {
        portfolio_return: gross - 1.0,
        index_return: index.map(|i| i - 1.0),
    })
}

pub(crate) fn trial_id(k: usize, trial: u64) -> u64 {
    ((k as u64) << 32) | trial
}

/// Per-benchmark (over, under) counts, summed over trials.
type Tally = Vec<(u64, u64)>;

fn add(mut a: Tally, b: Tally) -> Tally {
    for (x, y) in a.iter_mut().zip(b) {
        x.0 += y.0;
        x.1 += y.1;
    }
    a
}

/// Gross threshold levels `(over, under)` for each benchmark.
fn levels(benchmarks: &[BenchmarkPair], scale: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
    benchmarks
        .iter()
        .map(move |b| ((1.0 + b.over) * scale, (1.0 + b.under) * scale))
}

fn score(tally: &mut Tally, benchmarks: &[BenchmarkPair], gross: f64, scale: f64) {
    for (slot, (over, under)) in tally.iter_mut().zip(levels(benchmarks, scale)) {
        if gross > over {
            slot.0 += 1;
        } else if gross < under {
            slot.1 += 1;
        }
    }
}

/// Runs every (size, benchmark) cell on the current rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<FrequencyReport> {
    config.validate()?;
    let params = &config.params;
    let realized = config.mode == BenchmarkMode::RealizedIndex;
    let expected = expected_index_value(params);
    let nb = config.benchmarks.len();

    let mut rows = Vec::with_capacity(config.sizes.len() * nb);
    for &k in &config.sizes {
        let tally = (0..config.trials_per_size)
            .into_par_iter()
            .fold(
                || (Scratch::default(), vec![(0u64, 0u64); nb]),
                |(mut scratch, mut tally), t| {
                    let seed = SeedSpec::trial(config.master_seed, trial_id(k, t));
                    let (gross, index) =
                        trial_gross(params, k, seed, config.sampling, realized, &mut scratch);
                    let scale = index.map_or(1.0, |i| i / expected);
                    score(&mut tally, &config.benchmarks, gross, scale);
                    (scratch, tally)
                },
            )
            .map(|(_, tally)| tally)
            .reduce(|| vec![(0, 0); nb], add);

        for (b, (over, under)) in config.benchmarks.iter().zip(tally) {
            rows.push(FrequencyRow::from_counts(
                k,
                *b,
                over,
                under,
                config.trials_per_size,
                config.confidence,
            )?);
        }
    }
    sort_rows(&mut rows);
    Ok(FrequencyReport {
        config: config.clone(),
        rows,
    })
}

pub(crate) fn sort_rows(rows: &mut [FrequencyRow]) {
    rows.sort_by(|a, b| {
        a.k.cmp(&b.k)
            .then(a.benchmark.over.total_cmp(&b.benchmark.over))
            .then(a.benchmark.under.total_cmp(&b.benchmark.under))
    });
}

/// Samples uniform k-subsets of a fixed list of gross values against fixed
/// thresholds. Used to check sampling against exact enumeration.
pub fn sample_fixed_universe(
    values: &[f64],
    k: usize,
    trials: u64,
    benchmarks: &[BenchmarkPair],
    master_seed: u64,
    confidence: f64,
) -> Result<Vec<FrequencyRow>> {
    let n = values.len();
    if k == 0 || k > n || k >= MAX_SIZE {
        return Err(Error::Input(format!("portfolio size {k} outside 1..={n}")));
    }
    if trials == 0 || trials > MAX_TRIALS {
        return Err(Error::Input(format!("trials must be in 1..={MAX_TRIALS}")));
    }
    if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Input(
            "gross values must be positive and finite".into(),
        ));
    }
    let nb = benchmarks.len();
    let tally = (0..trials)
        .into_par_iter()
        .fold(
            || (Vec::new(), vec![(0u64, 0u64); nb]),
            |(mut order, mut tally), t| {
                let seed = SeedSpec::trial(master_seed, trial_id(k, t));
                let mut selection = seed.purpose(Purpose::Selection).stream();
                select(&mut order, n, k, &mut selection);
                let gross = sorted_subset_gross(values, &order[..k]);
                score(&mut tally, benchmarks, gross, 1.0);
                (order, tally)
            },
        )
        .map(|(_, tally)| tally)
        .reduce(|| vec![(0, 0); nb], add);

    benchmarks
        .iter()
        .zip(tally)
        .map(|(b, (over, under))| FrequencyRow::from_counts(k, *b, over, under, trials, confidence))
        .collect()
}

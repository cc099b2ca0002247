//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

use std::process::{Command, ExitCode};
use std::time::Instant;

use indexsim::analytic::{
    calibrate, expected_index_value, median_stock_value, paper_params, underperformance_factor,
    CalibrationTarget,
};
use indexsim::enumerate::{enumerate_portfolios, DeterministicIndex};
use indexsim::model::{draw_universe, ModelParams};
use indexsim::montecarlo::{run_experiment, sample_fixed_universe, ExperimentConfig, FrequencyRow};
use indexsim::report::summary_stats;
use indexsim::rng::SeedSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn demo_reproduction() -> Outcome {
    let idx = DeterministicIndex::five_stock_example();
    let stats =
        enumerate_portfolios(&idx, &[1, 2], &[idx.index_return()]).map_err(|e| e.to_string())?;
    let under = stats.comparisons[0].below_fraction();
    let cli = Command::new(env!("CARGO_BIN_EXE_indexsim"))
        .arg("demo")
        .output()
        .map_err(|e| e.to_string())?;
    let line = String::from_utf8_lossy(&cli.stdout)
        .lines()
        .find(|l| l.starts_with("portfolios="))
        .unwrap_or_default()
        .to_string();
    check(
        stats.portfolio_count == 15
            && close(stats.mean_return, 0.18, 1e-12)
            && close(stats.median_return, 0.10, 1e-12)
            && close(under, 10.0 / 15.0, 1e-12)
            && cli.status.success()
            && line == "portfolios=15 mean=0.180000 median=0.100000 under_fraction=0.666667",
        format!(
            "count={} mean={} median={} under={under} cli=\"{line}\"",
            stats.portfolio_count, stats.mean_return, stats.median_return
        ),
    )
}

fn calibration() -> Outcome {
    let c = calibrate(&CalibrationTarget::paper()).map_err(|e| e.to_string())?;
    let mu_pct = format!("{:.0}%", c.mu_hat * 100.0);
    let sh_pct = format!("{:.0}%", c.sigma_hat * 100.0);
    check(
        close(c.mu_hat, 0.0390620, 1e-6)
            && close(c.sigma_hat, 0.1296627, 1e-6)
            && mu_pct == "4%"
            && sh_pct == "13%",
        format!(
            "mu_hat={:.9} ({mu_pct}) sigma_hat={:.9} ({sh_pct})",
            c.mu_hat, c.sigma_hat
        ),
    )
}

fn closed_form() -> Outcome {
    let p = paper_params();
    let e = expected_index_value(&p);
    let m = median_stock_value(&p);
    let f = underperformance_factor(&p);
    check(
        rel(e, 1.5) <= 1e-12 && rel(m, 1.1) <= 1e-12 && f == e / m && rel(f, 1.5 / 1.1) <= 1e-12,
        format!("E[I]={e} median={m} factor={f}"),
    )
}

fn index_mean_over_universes() -> Outcome {
    let p = paper_params();
    let values: Vec<f64> = (0..2_000)
        .map(|t| draw_universe(&p, SeedSpec::trial(2025, t)).map(|u| u.index_value()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mean = summary_stats(&values).map_err(|e| e.to_string())?.mean;
    check(
        rel(mean, 1.5) <= 0.01,
        format!(
            "mean I over 2000 universes = {mean:.5} (rel err {:.2e})",
            rel(mean, 1.5)
        ),
    )
}

fn find(rows: &[FrequencyRow], k: usize, over: f64) -> &FrequencyRow {
    rows.iter()
        .find(|r| r.k == k && r.benchmark.over == over)
        .expect("row present")
}

fn single_stock_oracle(paper: &[FrequencyRow]) -> Outcome {
    let o50 = find(paper, 1, 0.5).over_freq();
    let pair = find(paper, 1, 0.7);
    let (o70, u30) = (pair.over_freq(), pair.under_freq());
    check(
        close(o50, 0.3469, 0.015) && close(o70, 0.2902, 0.015) && close(u30, 0.5840, 0.015),
        format!("over50={o50:.4} (0.3469) over70={o70:.4} (0.2902) under30={u30:.4} (0.5840), tol 0.015"),
    )
}

fn asymmetric_dominance(paper: &[FrequencyRow]) -> Outcome {
    let rows: Vec<&FrequencyRow> = paper.iter().filter(|r| r.benchmark.over == 0.7).collect();
    let mut failing = Vec::new();
    for r in &rows {
        let (u, o) = (r.under_freq(), r.over_freq());
        // Multinomial standard error of the difference of two cell frequencies.
        let se = ((u + o - (u - o).powi(2)) / r.trials as f64).sqrt();
        if u - o <= 5.0 * se {
            failing.push(format!(
                "k={} under={u:.4} over={o:.4} sep={:.1}se",
                r.k,
                (u - o) / se
            ));
        }
    }
    let gap = |k| {
        let r = find(paper, k, 0.7);
        r.under_freq() - r.over_freq()
    };
    let shrinks = gap(1) > gap(100);
    check(
        failing.is_empty() && shrinks,
        format!(
            "gap(k=1)={:.4} gap(k=100)={:.4}; {} of {} sizes short of 5se{}{}",
            gap(1),
            gap(100),
            failing.len(),
            rows.len(),
            if failing.is_empty() { "" } else { ": " },
            failing.join(", ")
        ),
    )
}

fn subset_mean_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1991);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..=12);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..4.0)).collect();
        let idx = DeterministicIndex::new(values).map_err(|e| e.to_string())?;
        let sizes: Vec<usize> = (1..=n).collect();
        let stats = enumerate_portfolios(&idx, &sizes, &[]).map_err(|e| e.to_string())?;
        let gross_mean = 1.0 + stats.mean_return;
        let index_mean = 1.0 + idx.index_return();
        worst = worst.max(rel(gross_mean, index_mean));
    }
    check(
        worst <= 1e-12,
        format!("100 universes, worst relative error {worst:.2e}"),
    )
}

fn fixed_universe_oracle() -> Outcome {
    let mut p = paper_params();
    p.n_stocks = 10;
    let universe = draw_universe(&p, SeedSpec::new(10, 0)).map_err(|e| e.to_string())?;
    let values = universe.terminal_values().to_vec();
    let idx = DeterministicIndex::new(values.clone()).map_err(|e| e.to_string())?;
    let pairs = ExperimentConfig::paper().benchmarks;
    let trials = 10_000;
    let mut worst = 0.0f64;
    for k in 1..=3 {
        let rows = sample_fixed_universe(&values, k, trials, &pairs, 8, 0.95)
            .map_err(|e| e.to_string())?;
        for r in &rows {
            let stats = enumerate_portfolios(&idx, &[k], &[r.benchmark.over, r.benchmark.under])
                .map_err(|e| e.to_string())?;
            let total = stats.portfolio_count as f64;
            let exact = [
                stats.comparisons[0].above as f64 / total,
                stats.comparisons[1].below as f64 / total,
            ];
            for (freq, p) in [r.over_freq(), r.under_freq()].into_iter().zip(exact) {
                let se = (p * (1.0 - p) / trials as f64).sqrt();
                let z = if se > 0.0 {
                    (freq - p).abs() / se
                } else if freq == p {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst = worst.max(z);
            }
        }
    }
    check(
        worst <= 5.0,
        format!("N=10, k=1..3, 1e4 trials: worst deviation {worst:.2} se"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str, threads: Option<&str>| -> Result<Vec<u8>, String> {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_indexsim"));
        cmd.args(["simulate", "--paper-defaults", "--out", name])
            .current_dir(dir.path())
            .env_remove("INDEXSIM_SEED");
        if let Some(t) = threads {
            cmd.args(["--threads", t]);
        }
        let out = cmd.output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        std::fs::read(dir.path().join(name)).map_err(|e| e.to_string())
    };
    let a = run("a.csv", None)?;
    let b = run("b.csv", None)?;
    let one = run("t1.csv", Some("1"))?;
    let eight = run("t8.csv", Some("8"))?;
    check(
        a == b && one == eight && a == one,
        format!(
            "repeat identical={} 1-vs-8 threads identical={} ({} bytes)",
            a == b,
            one == eight,
            a.len()
        ),
    )
}

fn skewness() -> Outcome {
    let mut p = paper_params();
    p.n_stocks = 100_000;
    let u = draw_universe(&p, SeedSpec::new(31, 0)).map_err(|e| e.to_string())?;
    let skew = summary_stats(u.terminal_values())
        .map_err(|e| e.to_string())?
        .skewness;
    let flat = ModelParams::new(100_000, 5.0, 0.0, p.mu_hat, 0.0).map_err(|e| e.to_string())?;
    let d = draw_universe(&flat, SeedSpec::new(31, 0)).map_err(|e| e.to_string())?;
    let degenerate = summary_stats(d.terminal_values())
        .map_err(|e| e.to_string())?
        .skewness;
    check(
        skew.is_some_and(|s| s > 0.0) && degenerate.is_none(),
        format!("skewness at calibration={skew:?}, at sigma=sigma_hat=0: {degenerate:?}"),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let paper = run_experiment(&ExperimentConfig::paper())
        .expect("paper experiment runs")
        .rows;
    let criteria: Vec<(&str, Criterion)> = vec![
        ("demo-exact-reproduction", Box::new(demo_reproduction)),
        ("calibration", Box::new(calibration)),
        ("closed-form-round-trip", Box::new(closed_form)),
        (
            "index-mean-over-universes",
            Box::new(index_mean_over_universes),
        ),
        (
            "single-stock-vs-closed-form",
            Box::new(|| single_stock_oracle(&paper)),
        ),
        (
            "asymmetric-pair-dominance",
            Box::new(|| asymmetric_dominance(&paper)),
        ),
        ("subset-mean-identity", Box::new(subset_mean_identity)),
        (
            "fixed-universe-vs-enumeration",
            Box::new(fixed_universe_oracle),
        ),
        ("determinism", Box::new(determinism)),
        ("skewness", Box::new(skewness)),
    ];
    let mut failed = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        match criterion() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1)
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.1}s)",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

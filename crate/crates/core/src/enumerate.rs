//! Exhaustive equal-weighted portfolio enumeration over a fixed universe.
//!
//! Every k-subset for every requested k is visited once, in lexicographic
//! order of member indices. Members are summed in ascending order of value,
//! so the statistics do not depend on how the universe is permuted.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sum::corrected_mean;

/// Default upper bound on the number of enumerated portfolios.
pub const DEFAULT_CAP: u64 = 10_000_000;

/// A fixed list of gross returns.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicIndex {
    gross_values: Vec<f64>,
}

impl DeterministicIndex {
    pub fn new(gross_values: Vec<f64>) -> Result<Self> {
        if gross_values.is_empty() {
            return Err(Error::Input(
                "deterministic index needs at least one stock".into(),
            ));
        }
        if let Some(bad) = gross_values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Input(format!(
                "gross values must be positive and finite, got {bad}"
            )));
        }
        Ok(Self { gross_values })
    }

    /// Four stocks returning 10% and one returning 50%.
    pub fn five_stock_example() -> Self {
        Self::new(vec![1.1, 1.1, 1.1, 1.1, 1.5]).expect("valid example")
    }

    pub fn gross_values(&self) -> &[f64] {
        &self.gross_values
    }

    pub fn len(&self) -> usize {
        self.gross_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gross_values.is_empty()
    }

    /// Net return of the full equal-weighted index.
    pub fn index_return(&self) -> f64 {
        let mut sorted = self.gross_values.clone();
        sorted.sort_by(f64::total_cmp);
        corrected_mean(sorted.iter().copied()) - 1.0
    }
}

/// Portfolio counts strictly below, equal to and strictly above a benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkComparison {
    /// Net benchmark return.
    pub benchmark: f64,
    pub below: u64,
    pub equal: u64,
    pub above: u64,
}

impl BenchmarkComparison {
    pub fn below_fraction(&self) -> f64 {
        self.below as f64 / (self.below + self.equal + self.above) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetStats {
    pub portfolio_count: u64,
    pub mean_return: f64,
    /// Middle element, or midpoint of the two middle elements for an even count.
    pub median_return: f64,
    /// Distinct net returns in ascending order with their multiplicities.
    pub histogram: Vec<(f64, u64)>,
    pub comparisons: Vec<BenchmarkComparison>,
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i + 1) as u128,
            None => return u128::MAX,
        };
    }
    acc
}

/// Advances `members` to the next k-combination of `0..n` in lexicographic
/// order. Returns false after the last one.
pub fn next_combination(members: &mut [usize], n: usize) -> bool {
    let k = members.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if members[i] < n - k + i {
            members[i] += 1;
            for j in i + 1..k {
                members[j] = members[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn validated_sizes(n: usize, sizes: &[usize]) -> Result<Vec<usize>> {
    if sizes.is_empty() {
        return Err(Error::Input("no portfolio sizes requested".into()));
    }
    let set: BTreeSet<usize> = sizes.iter().copied().collect();
    if let Some(bad) = set.iter().find(|&&k| k == 0 || k > n) {
        return Err(Error::Input(format!(
            "portfolio size {bad} outside 1..={n}"
        )));
    }
    Ok(set.into_iter().collect())
}

fn total_count(n: usize, sizes: &[usize]) -> u128 {
    sizes.iter().fold(0u128, |acc, &k| {
        acc.saturating_add(binomial(n as u64, k as u64))
    })
}

/// Calls `visit(members, net_return)` for every portfolio, sizes ascending.
pub fn for_each_portfolio<F>(
    index: &DeterministicIndex,
    sizes: &[usize],
    cap: u64,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&[usize], f64),
{
    let n = index.len();
    let sizes = validated_sizes(n, sizes)?;
    let count = total_count(n, &sizes);
    if count > cap as u128 {
        return Err(Error::Resource { count, cap });
    }
    let values = index.gross_values();
    let mut picked = Vec::new();
    for k in sizes {
        let mut members: Vec<usize> = (0..k).collect();
        loop {
            picked.clear();
            picked.extend(members.iter().map(|&i| values[i]));
            picked.sort_by(f64::total_cmp);
            visit(&members, corrected_mean(picked.iter().copied()) - 1.0);
            if !next_combination(&mut members, n) {
                break;
            }
        }
    }
    Ok(())
}

pub fn enumerate_portfolios(
    index: &DeterministicIndex,
    sizes: &[usize],
    benchmarks: &[f64],
) -> Result<SubsetStats> {
    enumerate_portfolios_with_cap(index, sizes, benchmarks, DEFAULT_CAP)
}

pub fn enumerate_portfolios_with_cap(
    index: &DeterministicIndex,
    sizes: &[usize],
    benchmarks: &[f64],
    cap: u64,
) -> Result<SubsetStats> {
    let n = index.len();
    let sizes = validated_sizes(n, sizes)?;
    let count = total_count(n, &sizes);
    if count > cap as u128 {
        return Err(Error::Resource { count, cap });
    }

    let mut sorted = index.gross_values().to_vec();
    sorted.sort_by(f64::total_cmp);

    let mut gross = Vec::with_capacity(count as usize);
    for &k in &sizes {
        let mut members: Vec<usize> = (0..k).collect();
        loop {
            gross.push(corrected_mean(members.iter().map(|&i| sorted[i])));
            if !next_combination(&mut members, n) {
                break;
            }
        }
    }
    gross.sort_by(f64::total_cmp);

    let len = gross.len();
    let median_gross = if len % 2 == 1 {
        gross[len / 2]
    } else {
        0.5 * (gross[len / 2 - 1] + gross[len / 2])
    };

    let mut histogram: Vec<(f64, u64)> = Vec::new();
    for &g in &gross {
        let r = g - 1.0;
        match histogram.last_mut() {
            Some((last, c)) if *last == r => *c += 1,
            _ => histogram.push((r, 1)),
        }
    }

    let comparisons = benchmarks
        .iter()
        .map(|&b| {
            let level = 1.0 + b;
            let below = gross.partition_point(|&g| g < level);
            let not_above = gross.partition_point(|&g| g <= level);
            BenchmarkComparison {
                benchmark: b,
                below: below as u64,
                equal: (not_above - below) as u64,
                above: (len - not_above) as u64,
            }
        })
        .collect();

    Ok(SubsetStats {
        portfolio_count: len as u64,
        mean_return: corrected_mean(gross.iter().copied()) - 1.0,
        median_return: median_gross - 1.0,
        histogram,
        comparisons,
    })
}

/// Fraction of enumerated portfolios whose return is strictly below `benchmark`.
pub fn underperformance_fraction(
    index: &DeterministicIndex,
    sizes: &[usize],
    benchmark: f64,
) -> Result<f64> {
    let stats = enumerate_portfolios(index, sizes, &[benchmark])?;
    Ok(stats.comparisons[0].below_fraction())
}

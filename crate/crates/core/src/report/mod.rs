//! Sample statistics and serialization of experiment results.

mod csv;
mod svg;

pub use self::csv::{
    emit_csv, parse_csv, records, write_csv, write_csv_file, CsvRecord, Precision, CSV_HEADER,
};
pub use self::svg::{emit_svg_chart, write_svg_file, SVG_HEIGHT, SVG_WIDTH};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sum::{compensated_sum, corrected_mean};

/// Moments of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleSummary {
    pub count: usize,
    pub mean: f64,
    /// Middle element, or midpoint of the two middle elements for an even count.
    pub median: f64,
    /// Unbiased (n - 1) variance; 0 for a single sample.
    pub variance: f64,
    /// Population-moment skewness `g1 = m3 / m2^(3/2)`; `None` when `m2 == 0`.
    pub skewness: Option<f64>,
}

pub fn summary_stats(samples: &[f64]) -> Result<SampleSummary> {
    if samples.is_empty() {
        return Err(Error::Input("summary of an empty sample".into()));
    }
    if let Some(bad) = samples.iter().find(|x| !x.is_finite()) {
        return Err(Error::Input(format!("non-finite sample value {bad}")));
    }
    let count = samples.len();
    let n = count as f64;
    let mean = corrected_mean(samples.iter().copied());
    let ss = compensated_sum(samples.iter().map(|x| (x - mean) * (x - mean)));
    let cubes = compensated_sum(samples.iter().map(|x| (x - mean).powi(3)));
    let m2 = ss / n;
    let m3 = cubes / n;

    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if count % 2 == 1 {
        sorted[count / 2]
    } else {
        0.5 * (sorted[count / 2 - 1] + sorted[count / 2])
    };

    Ok(SampleSummary {
        count,
        mean,
        median,
        variance: if count > 1 { ss / (n - 1.0) } else { 0.0 },
        skewness: (m2 > 0.0).then(|| m3 / m2.powf(1.5)),
    })
}

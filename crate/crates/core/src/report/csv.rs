use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::montecarlo::FrequencyReport;

pub const CSV_HEADER: &str =
    "k,over_threshold,under_threshold,over_freq,under_freq,over_ci,under_ci,trials,master_seed";

/// Decimal formatting of the real-valued columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Fixed number of decimals.
    Fixed(usize),
    /// Shortest representation that parses back to the same `f64`.
    Full,
}

impl Default for Precision {
    fn default() -> Self {
        Precision::Fixed(6)
    }
}

/// One CSV line. `over_ci`/`under_ci` are Wilson half-widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRecord {
    pub k: usize,
    pub over_threshold: f64,
    pub under_threshold: f64,
    pub over_freq: f64,
    pub under_freq: f64,
    pub over_ci: f64,
    pub under_ci: f64,
    pub trials: u64,
    pub master_seed: u64,
}

pub fn records(report: &FrequencyReport) -> Vec<CsvRecord> {
    report
        .rows
        .iter()
        .map(|row| CsvRecord {
            k: row.k,
            over_threshold: row.benchmark.over,
            under_threshold: row.benchmark.under,
            over_freq: row.over_freq(),
            under_freq: row.under_freq(),
            over_ci: row.over_ci.half_width,
            under_ci: row.under_ci.half_width,
            trials: row.trials,
            master_seed: report.config.master_seed,
        })
        .collect()
}

fn push_real(line: &mut String, x: f64, precision: Precision) {
    // Writing into a String cannot fail.
    let _ = match precision {
        Precision::Fixed(places) => write!(line, ",{x:.places$}"),
        Precision::Full => write!(line, ",{x}"),
    };
}

/// Writes the header and one line per record, sorted by `(k, over, under)`.
pub fn write_csv<W: Write>(
    records: &[CsvRecord],
    precision: Precision,
    mut out: W,
) -> io::Result<()> {
    let mut sorted = records.to_vec();
    sorted.sort_by(|a, b| {
        a.k.cmp(&b.k)
            .then(a.over_threshold.total_cmp(&b.over_threshold))
            .then(a.under_threshold.total_cmp(&b.under_threshold))
    });
    let mut text = String::with_capacity(64 * (sorted.len() + 1));
    text.push_str(CSV_HEADER);
    text.push('\n');
    for r in &sorted {
        let _ = write!(text, "{}", r.k);
        for x in [
            r.over_threshold,
            r.under_threshold,
            r.over_freq,
            r.under_freq,
            r.over_ci,
            r.under_ci,
        ] {
            push_real(&mut text, x, precision);
        }
        let _ = writeln!(text, ",{},{}", r.trials, r.master_seed);
    }
    out.write_all(text.as_bytes())
}

pub fn emit_csv(report: &FrequencyReport, precision: Precision) -> String {
    let mut buf = Vec::new();
    write_csv(&records(report), precision, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is ASCII")
}

pub fn write_csv_file(report: &FrequencyReport, precision: Precision, path: &Path) -> Result<()> {
    fs::write(path, emit_csv(report, precision)).map_err(|e| Error::io(path, e))
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(CSV_HEADER) => {}
        other => {
            return Err(Error::Input(format!(
                "expected CSV header `{CSV_HEADER}`, found `{}`",
                other.unwrap_or("")
            )))
        }
    }
    lines
        .enumerate()
        .filter(|(_, line)| !line.is_empty())
        .map(|(i, line)| {
            parse_line(line).map_err(|msg| Error::Input(format!("CSV line {}: {msg}", i + 2)))
        })
        .collect()
}

fn parse_line(line: &str) -> std::result::Result<CsvRecord, String> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 9 {
        return Err(format!("expected 9 fields, found {}", fields.len()));
    }
    let real = |i: usize| {
        fields[i]
            .parse::<f64>()
            .map_err(|e| format!("field {}: {e}", i + 1))
    };
    let int = |i: usize| {
        fields[i]
            .parse::<u64>()
            .map_err(|e| format!("field {}: {e}", i + 1))
    };
    Ok(CsvRecord {
        k: int(0)? as usize,
        over_threshold: real(1)?,
        under_threshold: real(2)?,
        over_freq: real(3)?,
        under_freq: real(4)?,
        over_ci: real(5)?,
        under_ci: real(6)?,
        trials: int(7)?,
        master_seed: int(8)?,
    })
}

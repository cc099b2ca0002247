//! Static SVG line chart of over/under frequencies versus portfolio size.
//!
//! One panel per benchmark pair, side by side, each with an "over" and an
//! "under" polyline. Axes are linear: `k` from 0 to the largest size, and
//! frequency from 0 to 1.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::montecarlo::{BenchmarkPair, FrequencyReport, FrequencyRow};

pub const SVG_WIDTH: f64 = 960.0;
pub const SVG_HEIGHT: f64 = 540.0;

const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 64.0;
const PANEL_GAP: f64 = 56.0;

const OVER_COLOR: &str = "#1f77b4";
const UNDER_COLOR: &str = "#d62728";

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn percent(x: f64) -> String {
    let p = x * 100.0;
    if (p - p.round()).abs() < 1e-9 {
        format!("{}%", p.round())
    } else {
        format!("{p:.1}%")
    }
}

/// Round step (1, 2 or 5 times a power of ten) giving about five ticks.
fn tick_step(max: f64) -> f64 {
    let raw = max / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|step| *step >= raw)
        .unwrap_or(10.0 * magnitude)
        .max(1.0)
}

struct Panel {
    left: f64,
    width: f64,
    top: f64,
    height: f64,
    x_max: f64,
}

impl Panel {
    fn x(&self, k: f64) -> f64 {
        self.left + self.width * k / self.x_max
    }

    fn y(&self, freq: f64) -> f64 {
        self.top + self.height * (1.0 - freq)
    }
}

pub fn emit_svg_chart(report: &FrequencyReport) -> Result<String> {
    if report.rows.is_empty() {
        return Err(Error::Input("cannot chart an empty report".into()));
    }
    let mut pairs: Vec<BenchmarkPair> = Vec::new();
    for row in &report.rows {
        if !pairs.contains(&row.benchmark) {
            pairs.push(row.benchmark);
        }
    }
    pairs.sort_by(|a, b| a.over.total_cmp(&b.over).then(a.under.total_cmp(&b.under)));

    let x_max = report.rows.iter().map(|r| r.k).max().unwrap_or(1) as f64;
    let panel_count = pairs.len() as f64;
    let panel_width =
        (SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT - PANEL_GAP * (panel_count - 1.0)) / panel_count;
    let config = serde_json::to_string(&report.config).expect("config serializes");

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = SVG_WIDTH,
        h = SVG_HEIGHT
    );
    let _ = writeln!(
        svg,
        "<title>Over- and underperformance frequency by portfolio size</title>"
    );
    let _ = writeln!(svg, "<desc>{}</desc>", escape(&config));
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    for (i, pair) in pairs.iter().enumerate() {
        let panel = Panel {
            left: MARGIN_LEFT + i as f64 * (panel_width + PANEL_GAP),
            width: panel_width,
            top: MARGIN_TOP,
            height: SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
            x_max,
        };
        let mut rows: Vec<&FrequencyRow> = report
            .rows
            .iter()
            .filter(|r| r.benchmark == *pair)
            .collect();
        rows.sort_by_key(|r| r.k);
        draw_panel(&mut svg, &panel, pair, &rows);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn draw_panel(svg: &mut String, panel: &Panel, pair: &BenchmarkPair, rows: &[&FrequencyRow]) {
    let bottom = panel.top + panel.height;
    let right = panel.left + panel.width;
    let _ = writeln!(svg, "<g class=\"panel\">");
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">Over {} / under {}</text>"#,
        panel.left + panel.width / 2.0,
        panel.top - 18.0,
        percent(pair.over),
        percent(pair.under)
    );

    // Grid and y ticks.
    for step in 0..=5 {
        let f = step as f64 / 5.0;
        let y = panel.y(f);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{right:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            panel.left
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{f:.1}</text>"#,
            panel.left - 6.0,
            y + 4.0
        );
    }
    let step = tick_step(panel.x_max);
    let mut k = 0.0;
    while k <= panel.x_max + 1e-9 {
        let x = panel.x(k);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{bottom:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            bottom + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{k}</text>"#,
            bottom + 18.0
        );
        k += step;
    }
    let _ = writeln!(
        svg,
        r#"<path d="M {:.2} {:.2} V {bottom:.2} H {right:.2}" fill="none" stroke="black"/>"#,
        panel.left, panel.top
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Portfolio size k</text>"#,
        panel.left + panel.width / 2.0,
        bottom + 40.0
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate({:.2},{:.2}) rotate(-90)" text-anchor="middle">Frequency</text>"#,
        panel.left - 40.0,
        panel.top + panel.height / 2.0
    );

    let label = format!("{}/{}", pair.over, pair.under);
    let series = [
        (
            "over",
            OVER_COLOR,
            "",
            format!("return &gt; {}", percent(pair.over)),
        ),
        (
            "under",
            UNDER_COLOR,
            r#" stroke-dasharray="6 3""#,
            format!("return &lt; {}", percent(pair.under)),
        ),
    ];
    for (s, (direction, color, dash, legend)) in series.iter().enumerate() {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| {
                let f = if *direction == "over" {
                    r.over_freq()
                } else {
                    r.under_freq()
                };
                (panel.x(r.k as f64), panel.y(f))
            })
            .collect();
        let coords: Vec<String> = points
            .iter()
            .map(|(x, y)| format!("{x:.2},{y:.2}"))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series" data-benchmark="{label}" data-direction="{direction}" points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#,
            coords.join(" ")
        );
        for (x, y) in &points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#
            );
        }
        let ly = panel.top + 14.0 + 16.0 * s as f64;
        let lx = right - 130.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash}/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{legend}</text>"#,
            lx + 30.0,
            ly + 4.0
        );
    }
    let _ = writeln!(svg, "</g>");
}

pub fn write_svg_file(report: &FrequencyReport, path: &Path) -> Result<()> {
    let svg = emit_svg_chart(report)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

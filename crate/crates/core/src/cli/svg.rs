//! Minimal self-contained SVG line charts.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XScale {
    Linear,
    Log10,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: XScale,
    pub series: Vec<Series>,
}

const W: f64 = 760.0;
const H: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        // Flat data: open a unit window around it.
        (lo - 0.5, hi + 0.5)
    }
}

fn ticks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

fn tick_label(v: f64) -> String {
    let r = (v * 1000.0).round() / 1000.0;
    if r == r.trunc() {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}

/// Renders the chart. Points with non-finite coordinates (or non-positive x
/// on a log axis) are skipped.
pub fn render(chart: &Chart) -> Result<String> {
    if chart.series.is_empty() {
        return Err(Error::Domain("chart has no series".into()));
    }
    if let Some(s) = chart.series.iter().find(|s| s.points.is_empty()) {
        return Err(Error::Domain(format!("series `{}` has no points", s.label)));
    }
    let tx = |x: f64| match chart.x_scale {
        XScale::Linear => x,
        XScale::Log10 => x.log10(),
    };
    let usable: Vec<Vec<(f64, f64)>> = chart
        .series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .map(|&(x, y)| (tx(x), y))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect()
        })
        .collect();
    if usable.iter().all(Vec::is_empty) {
        return Err(Error::Domain("chart has no finite points".into()));
    }
    let (x0, x1) = range(usable.iter().flatten().map(|p| p.0));
    let (y0, y1) = range(usable.iter().flatten().map(|p| p.1));
    let (y0, y1) = (y0.min(0.0), y1 + 0.05 * (y1 - y0.min(0.0)));
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&chart.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for t in ticks(x0, x1, 5) {
        let label = match chart.x_scale {
            XScale::Linear => tick_label(t),
            XScale::Log10 => tick_label(10f64.powf(t)),
        };
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{y0p:.2}" x2="{x:.2}" y2="{TOP}" stroke="#ddd"/><text x="{x:.2}" y="{ty:.2}" text-anchor="middle">{label}</text>"##,
            x = px(t),
            y0p = TOP + ph,
            ty = TOP + ph + 18.0,
        );
    }
    for t in ticks(y0, y1, 5) {
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{x1p:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{tx:.2}" y="{ty:.2}" text-anchor="end">{label}</text>"##,
            y = py(t),
            x1p = LEFT + pw,
            tx = LEFT - 6.0,
            ty = py(t) + 4.0,
            label = tick_label(t),
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        H - 15.0,
        escape(&chart.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{y}" text-anchor="middle" transform="rotate(-90 18 {y})">{}</text>"#,
        escape(&chart.y_label),
        y = TOP + ph / 2.0
    );
    for (i, (series, pts)) in chart.series.iter().zip(&usable).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dash = if series.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.8"{dash} points="{}"/>"#,
            coords.join(" ")
        );
        let ly = TOP + 14.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.8"{dash}/><text x="{}" y="{}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(&series.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Renders and writes the chart.
pub fn emit_svg_chart(chart: &Chart, path: &Path) -> Result<()> {
    let svg = render(chart)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

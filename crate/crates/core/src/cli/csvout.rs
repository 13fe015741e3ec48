//! Result table writer with a fixed column order.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Column order of every results file. Changing this is a breaking change.
pub const HEADER: [&str; 14] = [
    "scenario",
    "M",
    "receiver",
    "mu",
    "p_u",
    "q_u",
    "p_j",
    "q_j",
    "delta_source",
    "rate_closed",
    "rate_mc",
    "ci95",
    "sinr_closed",
    "sinr_mc",
];

/// Which correlations a closed-form column was evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaSource {
    /// Exact correlations of each drawn jamming sequence.
    True,
    /// Pilot-based estimates.
    Estimated,
    /// The mean value `1/τ`.
    Mean,
    /// No correlations involved (e.g. `M → ∞` or Monte Carlo only).
    None,
}

impl DeltaSource {
    pub fn as_str(self) -> &'static str {
        match self {
            DeltaSource::True => "true",
            DeltaSource::Estimated => "estimated",
            DeltaSource::Mean => "mean",
            DeltaSource::None => "",
        }
    }
}

/// One output row. `None` cells are written empty without comment.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub m: Option<usize>,
    pub receiver: String,
    pub mu: Option<f64>,
    pub p_u: f64,
    pub q_u: f64,
    pub p_j: f64,
    pub q_j: f64,
    pub delta_source: DeltaSource,
    pub rate_closed: Option<f64>,
    pub rate_mc: Option<f64>,
    pub ci95: Option<f64>,
    pub sinr_closed: Option<f64>,
    pub sinr_mc: Option<f64>,
}

/// `%.9g`-style formatting: 9 significant digits, exponent outside
/// `[1e-5, 1e9)`, trailing zeros removed.
pub fn format_g9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    // Rounding can push the exponent up by one (e.g. 9.9999999996).
    let sci = format!("{:.8e}", x);
    let (mantissa, e) = sci.split_once('e').unwrap_or((&sci, "0"));
    let e: i32 = e.parse().unwrap_or(exp);
    if !(-5..9).contains(&e) {
        let m = trim_zeros(mantissa);
        let sign = if e < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", e.abs());
    }
    let decimals = (8 - e).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn cell(value: Option<f64>, column: &str, row: usize, warn: &mut dyn Write) -> String {
    match value {
        None => String::new(),
        Some(v) if v.is_finite() => format_g9(v),
        Some(v) => {
            let _ = writeln!(warn, "warning: row {row}, column {column}: non-finite value {v} written as empty cell");
            String::new()
        }
    }
}

/// Serializes rows to any writer; warnings about non-finite values go to `warn`.
pub fn write_rows<W: Write>(rows: &[ResultRow], out: W, warn: &mut dyn Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for (i, r) in rows.iter().enumerate() {
        let n = i + 1;
        let record = [
            r.scenario.clone(),
            r.m.map(|m| m.to_string()).unwrap_or_default(),
            r.receiver.clone(),
            cell(r.mu, "mu", n, warn),
            cell(Some(r.p_u), "p_u", n, warn),
            cell(Some(r.q_u), "q_u", n, warn),
            cell(Some(r.p_j), "p_j", n, warn),
            cell(Some(r.q_j), "q_j", n, warn),
            r.delta_source.as_str().to_string(),
            cell(r.rate_closed, "rate_closed", n, warn),
            cell(r.rate_mc, "rate_mc", n, warn),
            cell(r.ci95, "ci95", n, warn),
            cell(r.sinr_closed, "sinr_closed", n, warn),
            cell(r.sinr_mc, "sinr_mc", n, warn),
        ];
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::Domain(format!("flushing CSV output: {e}")))?;
    Ok(())
}

/// Writes the results file, warning on stderr about non-finite values.
pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_rows(rows, std::io::BufWriter::new(file), &mut std::io::stderr())
}

/// Writes an auxiliary table with its own header (same number format).
pub fn emit_table(header: &[&str], rows: &[Vec<f64>], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(std::io::BufWriter::new(file));
    w.write_record(header)?;
    let mut stderr = std::io::stderr();
    for (i, r) in rows.iter().enumerate() {
        let record: Vec<String> = r
            .iter()
            .zip(header)
            .map(|(v, h)| cell(Some(*v), h, i + 1, &mut stderr))
            .collect();
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

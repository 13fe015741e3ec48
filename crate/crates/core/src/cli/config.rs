//! Flat `key = value` scenario files.
//!
//! ```text
//! # comments run to end of line
//! name = sweep-m
//! m_list = 20, 50, 100
//! p_j = 3.1623
//! ```
//!
//! Keys are the field names of [`SystemConfig`], [`MonteCarloPlan`] and
//! [`Scenario`]. `name` is required and must match the scenario selected on
//! the command line. Powers are linear; the `*_db_list` keys are in dB.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{ConfigIssue, Error, Result};
use crate::model::{ReceiverSpec, SystemConfig};
use crate::montecarlo::MonteCarloPlan;

use super::ScenarioName;

/// Experiment-level parameters. `None` means "use the scenario default".
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scenario {
    pub name: Option<ScenarioName>,
    pub output_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
    pub m_list: Option<Vec<usize>>,
    pub snr_db_list: Option<Vec<f64>>,
    pub jam_db_list: Option<Vec<f64>>,
    pub ratio_list: Option<Vec<f64>>,
    pub receivers: Option<Vec<ReceiverSpec>>,
    pub p_avg: Option<f64>,
}

/// Everything a scenario file can set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioFile {
    pub scenario: Scenario,
    pub system: SystemConfig,
    /// Keys that were present in the file, in file order.
    pub system_keys: Vec<&'static str>,
    pub plan: MonteCarloPlan,
}


const SYSTEM_KEYS: [&str; 10] = [
    "m", "t_coh", "tau", "beta_u", "beta_j", "sigma2", "p_u", "q_u", "p_j", "q_j",
];

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn scalar<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| parse_error(line, format!("cannot parse `{value}` for `{key}`")))
}

fn list<T: FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>> {
    let items: Vec<&str> = value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(parse_error(line, format!("`{key}` needs at least one value")));
    }
    items.into_iter().map(|v| scalar(line, key, v)).collect()
}

/// Parses a comma-separated list (also used for command-line overrides).
pub fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    list(0, key, value).map_err(|e| match e {
        Error::Parse { message, .. } => Error::config("command line", message),
        other => other,
    })
}

/// Parses scenario-file text.
pub fn parse_str(text: &str) -> Result<ScenarioFile> {
    let mut out = ScenarioFile::default();
    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_error(line, format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(parse_error(line, "empty key or value"));
        }
        if seen.iter().any(|k| k == key) {
            return Err(parse_error(line, format!("duplicate key `{key}`")));
        }
        seen.push(key.to_string());

        let sys = &mut out.system;
        let plan = &mut out.plan;
        let sc = &mut out.scenario;
        match key {
            "m" => sys.m = scalar(line, key, value)?,
            "t_coh" => sys.t_coh = scalar(line, key, value)?,
            "tau" => sys.tau = scalar(line, key, value)?,
            "beta_u" => sys.beta_u = scalar(line, key, value)?,
            "beta_j" => sys.beta_j = scalar(line, key, value)?,
            "sigma2" => sys.sigma2 = scalar(line, key, value)?,
            "p_u" => sys.p_u = scalar(line, key, value)?,
            "q_u" => sys.q_u = scalar(line, key, value)?,
            "p_j" => sys.p_j = scalar(line, key, value)?,
            "q_j" => sys.q_j = scalar(line, key, value)?,
            "n_sj_draws" => plan.n_sj_draws = scalar(line, key, value)?,
            "n_trials_per_sj" => plan.n_trials_per_sj = scalar(line, key, value)?,
            "seed" => plan.seed = scalar(line, key, value)?,
            "worker_hint" => plan.worker_hint = scalar(line, key, value)?,
            "name" => sc.name = Some(scalar(line, key, value)?),
            "output_path" => sc.output_path = Some(PathBuf::from(value)),
            "svg_path" => sc.svg_path = Some(PathBuf::from(value)),
            "m_list" => sc.m_list = Some(list(line, key, value)?),
            "snr_db_list" => sc.snr_db_list = Some(list(line, key, value)?),
            "jam_db_list" => sc.jam_db_list = Some(list(line, key, value)?),
            "ratio_list" => sc.ratio_list = Some(list(line, key, value)?),
            "receivers" => sc.receivers = Some(list(line, key, value)?),
            "p_avg" => sc.p_avg = Some(scalar(line, key, value)?),
            _ => return Err(parse_error(line, format!("unknown key `{key}`"))),
        }
        if let Some(k) = SYSTEM_KEYS.iter().find(|k| **k == key) {
            out.system_keys.push(k);
        }
    }
    if out.scenario.name.is_none() {
        return Err(Error::Config(vec![ConfigIssue {
            field: "name",
            message: "required key is missing".into(),
        }]));
    }
    out.system.validate().map_err(Error::Config)?;
    Ok(out)
}

/// Reads and parses a scenario file.
pub fn parse_config(path: &Path) -> Result<ScenarioFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_str(&text)
}

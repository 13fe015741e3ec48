//! Command-line experiment runner.
//!
//! ```text
//! jamrx <scenario> --config <path> [--m-list 50,100] [--snr-db-list 0,5]
//!       [--receiver mrc|zf|mmse|rzf:<mu>] [--sj-draws N] [--trials N]
//!       [--seed N] [--out results.csv] [--svg chart.svg] [--workers N]
//! ```
//!
//! Exit status: 0 on success, 1 for configuration problems (bad flags,
//! unreadable or invalid config file), 2 for failures while running.

pub mod config;
pub mod csvout;
pub mod scenarios;
pub mod svg;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Parser;

use crate::error::{Error, Result};
use crate::model::ReceiverSpec;

pub use config::{parse_config, Scenario, ScenarioFile};
pub use scenarios::{run_scenario, Report, Resolved};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioName {
    SweepM,
    SweepJamBoth,
    SweepJamPilot,
    SweepPowerRatio,
    PowerAlloc,
    DeltaNmse,
    Validate,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 7] = [
        ScenarioName::SweepM,
        ScenarioName::SweepJamBoth,
        ScenarioName::SweepJamPilot,
        ScenarioName::SweepPowerRatio,
        ScenarioName::PowerAlloc,
        ScenarioName::DeltaNmse,
        ScenarioName::Validate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::SweepM => "sweep-m",
            ScenarioName::SweepJamBoth => "sweep-jam-both",
            ScenarioName::SweepJamPilot => "sweep-jam-pilot",
            ScenarioName::SweepPowerRatio => "sweep-power-ratio",
            ScenarioName::PowerAlloc => "power-alloc",
            ScenarioName::DeltaNmse => "delta-nmse",
            ScenarioName::Validate => "validate",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::ALL.iter().map(|n| n.as_str()).collect();
                format!("unknown scenario `{s}` (expected one of: {})", names.join(", "))
            })
    }
}

#[derive(Debug, Parser)]
#[command(name = "jamrx", version, about = "Massive MIMO uplink under pilot and data jamming: scenario runner")]
pub struct Args {
    /// sweep-m | sweep-jam-both | sweep-jam-pilot | sweep-power-ratio | power-alloc | delta-nmse | validate
    pub scenario: ScenarioName,
    /// Scenario file (`key = value` lines).
    #[arg(long)]
    pub config: PathBuf,
    /// Comma-separated antenna counts.
    #[arg(long)]
    pub m_list: Option<String>,
    /// Comma-separated SNR values in dB.
    #[arg(long)]
    pub snr_db_list: Option<String>,
    /// Receiver: mrc, zf, mmse or rzf:<mu>.
    #[arg(long)]
    pub receiver: Option<ReceiverSpec>,
    /// Jamming-sequence draws (the reference studies use 10000).
    #[arg(long)]
    pub sj_draws: Option<usize>,
    /// Trials per jamming sequence.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Results CSV (default `<scenario>.csv`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG chart.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Worker threads: 1 = sequential, 0 = all cores.
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Merges the scenario file with command-line overrides.
pub fn resolve(args: &Args, file: ScenarioFile) -> Result<Resolved> {
    let ScenarioFile {
        mut scenario,
        system,
        system_keys,
        mut plan,
    } = file;
    if let Some(name) = scenario.name {
        if name != args.scenario {
            return Err(Error::config(
                "name",
                format!("config file is for scenario `{name}`, not `{}`", args.scenario),
            ));
        }
    }
    if let Some(v) = &args.m_list {
        scenario.m_list = Some(config::parse_list("m-list", v)?);
    }
    if let Some(v) = &args.snr_db_list {
        scenario.snr_db_list = Some(config::parse_list("snr-db-list", v)?);
    }
    if let Some(r) = args.receiver {
        scenario.receivers = Some(vec![r]);
    }
    if let Some(v) = args.sj_draws {
        plan.n_sj_draws = v;
    }
    if let Some(v) = args.trials {
        plan.n_trials_per_sj = v;
    }
    if let Some(v) = args.seed {
        plan.seed = v;
    }
    if let Some(v) = args.workers {
        plan.worker_hint = v;
    }
    if let Some(v) = &args.out {
        scenario.output_path = Some(v.clone());
    }
    if let Some(v) = &args.svg {
        scenario.svg_path = Some(v.clone());
    }
    plan.validate()?;
    Ok(Resolved {
        name: args.scenario,
        system,
        system_keys,
        plan,
        scenario,
    })
}

fn aux_path(main: &Path, suffix: &str) -> PathBuf {
    let stem = main.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    main.with_file_name(format!("{stem}_{suffix}.csv"))
}

/// Runs a resolved scenario and writes all outputs.
pub fn execute(resolved: &Resolved) -> Result<Report> {
    let out = resolved
        .scenario
        .output_path
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", resolved.name)));
    let report = resolved.plan.execution().install(|| run_scenario(resolved))?;
    csvout::emit_csv(&report.rows, &out)?;
    if let Some(aux) = &report.aux {
        csvout::emit_table(&aux.header, &aux.rows, &aux_path(&out, aux.suffix))?;
    }
    if let Some(svg) = &resolved.scenario.svg_path {
        svg::emit_svg_chart(&report.chart, svg)?;
    }
    Ok(report)
}

/// Full command-line entry point; returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let resolved = match parse_config(&args.config).and_then(|f| resolve(&args, f)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match execute(&resolved) {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            for note in &report.notes {
                let _ = writeln!(stdout, "{note}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                1
            } else {
                2
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_names_round_trip() {
        for n in ScenarioName::ALL {
            assert_eq!(n.as_str().parse::<ScenarioName>().unwrap(), n);
        }
        assert!("sweep".parse::<ScenarioName>().is_err());
    }

    #[test]
    fn flags_override_file() {
        let args = Args::try_parse_from([
            "jamrx", "validate", "--config", "x.cfg", "--m-list", "8,16", "--receiver", "rzf:0.25", "--seed", "9",
        ])
        .unwrap();
        let file = config::parse_str("name = validate\nm_list = 32\nseed = 3\n").unwrap();
        let r = resolve(&args, file).unwrap();
        assert_eq!(r.scenario.m_list, Some(vec![8, 16]));
        assert_eq!(r.plan.seed, 9);
        assert_eq!(r.scenario.receivers, Some(vec![ReceiverSpec::rzf(0.25).unwrap()]));
    }

    #[test]
    fn mismatched_name_is_config_error() {
        let args = Args::try_parse_from(["jamrx", "sweep-m", "--config", "x.cfg"]).unwrap();
        let file = config::parse_str("name = validate\n").unwrap();
        assert!(resolve(&args, file).unwrap_err().is_config_error());
    }

    #[test]
    fn aux_path_uses_stem() {
        assert_eq!(aux_path(Path::new("/tmp/out/run.csv"), "nmse"), PathBuf::from("/tmp/out/run_nmse.csv"));
    }
}

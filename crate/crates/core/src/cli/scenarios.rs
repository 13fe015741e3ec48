//! The experiment scenarios behind each subcommand.
//!
//! Sweep points run in order; the jamming-sequence draws and trials inside
//! each point fan out over the worker pool. Every point reuses the same seed,
//! so neighbouring points share random numbers and curves are smooth.

use crate::analysis::{achievable_rate, closed_form_sinr, rho_asymptotic, sample_deltas, AsymptoticSinr, RateEstimate};
use crate::db_to_linear;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{DeltaPair, JammerSequence, PilotBook, ReceiverSpec, SystemConfig};
use crate::montecarlo::{empirical_rates, empirical_rates_with, empirical_sinr_multi, nmse_delta, MonteCarloPlan, ReceiverRates};
use crate::powerctl::{asymptotic_power_split, optimal_power_split_zf, suboptimal_power_split, PowerSplit};
use crate::C64;

use super::config::Scenario;
use super::csvout::{DeltaSource, ResultRow};
use super::svg::{Chart, Series, XScale};
use super::ScenarioName;

/// A scenario with every default resolved except the per-scenario ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub name: ScenarioName,
    pub system: SystemConfig,
    /// System keys set explicitly (file or flags); scenario defaults never
    /// override these.
    pub system_keys: Vec<&'static str>,
    pub plan: MonteCarloPlan,
    pub scenario: Scenario,
}

/// Extra table written next to the main CSV as `<stem>_<suffix>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxTable {
    pub suffix: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Vec<ResultRow>,
    pub chart: Chart,
    pub aux: Option<AuxTable>,
    /// Human-readable summary lines.
    pub notes: Vec<String>,
}

const FIVE_DB: f64 = 5.0;

impl Resolved {
    fn explicit(&self, key: &str) -> bool {
        self.system_keys.contains(&key)
    }

    /// Applies a scenario default to `p_u`, `q_u`, `p_j` or `q_j` unless the
    /// user set it.
    fn power_default(&self, cfg: &mut SystemConfig, key: &'static str, value: f64) {
        if self.explicit(key) {
            return;
        }
        match key {
            "p_u" => cfg.p_u = value,
            "q_u" => cfg.q_u = value,
            "p_j" => cfg.p_j = value,
            "q_j" => cfg.q_j = value,
            _ => unreachable!("not a power key: {key}"),
        }
    }

    fn m_list(&self, default: &[usize]) -> Vec<usize> {
        self.scenario.m_list.clone().unwrap_or_else(|| default.to_vec())
    }

    fn receivers(&self, default: &[ReceiverSpec]) -> Vec<ReceiverSpec> {
        self.scenario.receivers.clone().unwrap_or_else(|| default.to_vec())
    }

    fn p_avg(&self) -> f64 {
        self.scenario.p_avg.unwrap_or_else(|| db_to_linear(FIVE_DB))
    }
}

fn mu_cell(r: &ReceiverSpec) -> Option<f64> {
    match r.kind {
        crate::model::ReceiverKind::Rzf => Some(r.mu),
        _ => None,
    }
}

fn rows_from_rates(scenario: &str, cfg: &SystemConfig, rates: &[ReceiverRates]) -> Vec<ResultRow> {
    rates
        .iter()
        .map(|r| ResultRow {
            scenario: scenario.to_string(),
            m: Some(cfg.m),
            receiver: r.receiver.to_string(),
            mu: mu_cell(&r.receiver),
            p_u: cfg.p_u,
            q_u: cfg.q_u,
            p_j: cfg.p_j,
            q_j: cfg.q_j,
            delta_source: DeltaSource::True,
            rate_closed: r.closed.as_ref().map(|c| c.rate.rate),
            rate_mc: Some(r.rate.rate),
            ci95: Some(r.rate.ci95),
            sinr_closed: r.closed.as_ref().map(|c| c.mean_sinr),
            sinr_mc: Some(r.mean_sinr),
        })
        .collect()
}

/// Accumulates chart series keyed by label, in first-seen order.
#[derive(Default)]
struct SeriesSet(Vec<Series>);

impl SeriesSet {
    fn push(&mut self, label: String, dashed: bool, x: f64, y: Option<f64>) {
        let Some(y) = y else { return };
        match self.0.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push((x, y)),
            None => self.0.push(Series {
                label,
                points: vec![(x, y)],
                dashed,
            }),
        }
    }

    fn push_rates(&mut self, tag: &str, x: f64, rates: &[ReceiverRates]) {
        for r in rates {
            self.push(format!("{} {tag}simul.", r.receiver), false, x, Some(r.rate.rate));
            self.push(
                format!("{} {tag}anal.", r.receiver),
                true,
                x,
                r.closed.as_ref().map(|c| c.rate.rate),
            );
        }
    }
}

pub fn run_scenario(r: &Resolved) -> Result<Report> {
    r.plan.validate()?;
    r.system.validate().map_err(Error::Config)?;
    if let Some(ms) = &r.scenario.m_list {
        if ms.contains(&0) {
            return Err(Error::config("m_list", "antenna counts must be >= 1"));
        }
    }
    if let Some(p) = r.scenario.p_avg {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::config("p_avg", "must be a positive finite number"));
        }
    }
    match r.name {
        ScenarioName::SweepM => sweep_m(r),
        ScenarioName::SweepJamBoth => sweep_jam(r, true),
        ScenarioName::SweepJamPilot => sweep_jam(r, false),
        ScenarioName::SweepPowerRatio => sweep_power_ratio(r),
        ScenarioName::PowerAlloc => power_alloc(r),
        ScenarioName::DeltaNmse => delta_nmse(r),
        ScenarioName::Validate => validate(r),
    }
}

fn sweep_m(r: &Resolved) -> Result<Report> {
    let ms = r.m_list(&[20, 50, 100, 200, 400]);
    let snrs = r.scenario.snr_db_list.clone().unwrap_or_else(|| vec![0.0, 5.0, 10.0]);
    let receivers = r.receivers(&[ReceiverSpec::MRC, ReceiverSpec::MMSE, ReceiverSpec::ZF]);
    let pilots = PilotBook::for_config(&r.system)?;
    let mut rows = Vec::new();
    let mut series = SeriesSet::default();
    for &snr in &snrs {
        for &m in &ms {
            let cfg = r.system.with_m(m).with_all_powers(db_to_linear(snr)).checked()?;
            let rates = empirical_rates(&cfg, &pilots, &receivers, &r.plan)?;
            series.push_rates(&format!("{snr} dB "), m as f64, &rates);
            rows.extend(rows_from_rates("sweep-m", &cfg, &rates));
        }
    }
    Ok(Report {
        rows,
        chart: Chart {
            title: "Achievable rate versus number of antennas".into(),
            x_label: "M".into(),
            y_label: "rate (bits/s/Hz)".into(),
            x_scale: XScale::Linear,
            series: series.0,
        },
        aux: None,
        notes: vec![format!("{} sweep points, powers p_u=q_u=p_j=q_j=SNR", ms.len() * snrs.len())],
    })
}

fn sweep_jam(r: &Resolved, both: bool) -> Result<Report> {
    let jams = r
        .scenario
        .jam_db_list
        .clone()
        .unwrap_or_else(|| (0..=12).map(|k| -20.0 + 5.0 * k as f64).collect());
    let receivers = r.receivers(&[ReceiverSpec::MRC, ReceiverSpec::MMSE, ReceiverSpec::ZF]);
    let mut base = r.system;
    r.power_default(&mut base, "p_u", db_to_linear(FIVE_DB));
    r.power_default(&mut base, "q_u", db_to_linear(FIVE_DB));
    if !both {
        r.power_default(&mut base, "q_j", db_to_linear(FIVE_DB));
    }
    let pilots = PilotBook::for_config(&base)?;
    let name = if both { "sweep-jam-both" } else { "sweep-jam-pilot" };
    let mut rows = Vec::new();
    let mut series = SeriesSet::default();
    let mut notes = Vec::new();
    for &db in &jams {
        let p = db_to_linear(db);
        let cfg = if both {
            base.with_jammer_powers(p, p)
        } else {
            base.with_jammer_powers(p, base.q_j)
        }
        .checked()?;
        let rates = empirical_rates(&cfg, &pilots, &receivers, &r.plan)?;
        series.push_rates("", db, &rates);
        rows.extend(rows_from_rates(name, &cfg, &rates));
    }
    if both {
        let deltas = sample_deltas(&pilots, r.plan.n_sj_draws, r.plan.seed, r.plan.execution())?;
        let limit = strong_jamming_rate(&base, &deltas)?;
        notes.push(format!(
            "ZF strong-jamming limit (p_j = q_j -> inf): rate = {:.6} bits/s/Hz",
            limit.rate
        ));
        for &db in &[jams[0], jams[jams.len() - 1]] {
            series.push("zf limit".into(), true, db, Some(limit.rate));
        }
    }
    Ok(Report {
        rows,
        chart: Chart {
            title: if both {
                "Achievable rate versus jamming powers p_j = q_j".into()
            } else {
                "Achievable rate versus jamming pilot power p_j".into()
            },
            x_label: if both { "p_j = q_j (dB)".into() } else { "p_j (dB)".into() },
            y_label: "rate (bits/s/Hz)".into(),
            x_scale: XScale::Linear,
            series: series.0,
        },
        aux: None,
        notes,
    })
}

/// Mean ZF rate in the `p_j = q_j → ∞` limit over the given draws.
pub fn strong_jamming_rate(cfg: &SystemConfig, deltas: &[DeltaPair]) -> Result<RateEstimate> {
    let rates = deltas
        .iter()
        .map(|d| {
            let s = crate::analysis::strong_jamming_limit_zf(cfg, 1.0, d)?;
            Ok(achievable_rate(s, cfg.tau, cfg.t_coh))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateEstimate::from_samples(&rates))
}

fn split_for_ratio(cfg: &SystemConfig, ratio: f64, p_avg: f64) -> Result<PowerSplit> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::config("ratio_list", "ratios must be positive"));
    }
    let (t, tau) = (cfg.t_coh as f64, cfg.tau as f64);
    let q_u = t * p_avg / (tau * ratio + t - tau);
    Ok(PowerSplit { p_u: ratio * q_u, q_u })
}

fn mean_closed_rate(cfg: &SystemConfig, receiver: &ReceiverSpec, deltas: &[DeltaPair]) -> Result<Option<RateEstimate>> {
    let mut rates = Vec::with_capacity(deltas.len());
    for d in deltas {
        match closed_form_sinr(cfg, d, receiver)? {
            Some(s) => rates.push(achievable_rate(s, cfg.tau, cfg.t_coh)),
            None => return Ok(None),
        }
    }
    Ok(Some(RateEstimate::from_samples(&rates)))
}

fn asymptotic_rate(cfg: &SystemConfig, deltas: &[DeltaPair]) -> RateEstimate {
    let rates: Vec<f64> = deltas
        .iter()
        .map(|d| match rho_asymptotic(cfg, d) {
            AsymptoticSinr::Finite(s) => achievable_rate(s, cfg.tau, cfg.t_coh),
            AsymptoticSinr::Unbounded => f64::INFINITY,
        })
        .collect();
    RateEstimate::from_samples(&rates)
}

fn sweep_power_ratio(r: &Resolved) -> Result<Report> {
    let p_avg = r.p_avg();
    let ratios = r
        .scenario
        .ratio_list
        .clone()
        .unwrap_or_else(|| (0..=16).map(|k| 10f64.powf(-1.0 + 0.25 * k as f64)).collect());
    let receivers = r.receivers(&[ReceiverSpec::MMSE, ReceiverSpec::ZF]);
    let mut base = r.system;
    r.power_default(&mut base, "p_j", db_to_linear(FIVE_DB));
    r.power_default(&mut base, "q_j", db_to_linear(FIVE_DB));
    let pilots = PilotBook::for_config(&base)?;
    let deltas = sample_deltas(&pilots, r.plan.n_sj_draws, r.plan.seed, r.plan.execution())?;

    let mut rows = Vec::new();
    let mut series = SeriesSet::default();
    let mut best: Vec<(f64, f64)> = vec![(f64::NAN, f64::NEG_INFINITY); receivers.len()];
    for &ratio in &ratios {
        let cfg = split_for_ratio(&base, ratio, p_avg)?.apply(&base).checked()?;
        let rates = empirical_rates(&cfg, &pilots, &receivers, &r.plan)?;
        for (b, rr) in best.iter_mut().zip(&rates) {
            if rr.rate.rate > b.1 {
                *b = (ratio, rr.rate.rate);
            }
        }
        series.push_rates("", ratio, &rates);
        rows.extend(rows_from_rates("sweep-power-ratio", &cfg, &rates));

        let asy = asymptotic_rate(&cfg, &deltas);
        series.push("M -> inf".into(), true, ratio, Some(asy.rate));
        rows.push(ResultRow {
            scenario: "sweep-power-ratio/asymptotic".into(),
            m: None,
            receiver: ReceiverSpec::ZF.to_string(),
            mu: None,
            p_u: cfg.p_u,
            q_u: cfg.q_u,
            p_j: cfg.p_j,
            q_j: cfg.q_j,
            delta_source: DeltaSource::True,
            rate_closed: Some(asy.rate),
            rate_mc: None,
            ci95: None,
            sinr_closed: None,
            sinr_mc: None,
        });
    }

    let mut notes = Vec::new();
    for (rx, (ratio, rate)) in receivers.iter().zip(&best) {
        notes.push(format!("empirical argmax for {rx}: p_u/q_u = {ratio:.4} (rate {rate:.4})"));
    }
    let sub = suboptimal_power_split(&base, p_avg)?;
    let sub_cfg = sub.apply(&base);
    let sub_rate = mean_closed_rate(&sub_cfg, &ReceiverSpec::ZF, &deltas)?;
    let opt_ratios: Vec<f64> = deltas
        .iter()
        .map(|d| optimal_power_split_zf(&base, d, p_avg).map(|s| s.p_u / s.q_u))
        .collect::<Result<_>>()?;
    let asy = asymptotic_power_split(base.t_coh, base.tau, p_avg)?;
    notes.push(format!(
        "closed-form optimum (mean correlations): p_u/q_u = {:.4}; per-draw optimum averages {:.4}; M -> inf optimum {:.4}",
        sub.p_u / sub.q_u,
        opt_ratios.iter().sum::<f64>() / opt_ratios.len() as f64,
        asy.p_u / asy.q_u
    ));
    rows.push(ResultRow {
        scenario: "sweep-power-ratio/predicted-optimum".into(),
        m: Some(base.m),
        receiver: ReceiverSpec::ZF.to_string(),
        mu: None,
        p_u: sub_cfg.p_u,
        q_u: sub_cfg.q_u,
        p_j: base.p_j,
        q_j: base.q_j,
        delta_source: DeltaSource::Mean,
        rate_closed: sub_rate.map(|e| e.rate),
        rate_mc: None,
        ci95: None,
        sinr_closed: None,
        sinr_mc: None,
    });
    Ok(Report {
        rows,
        chart: Chart {
            title: "Achievable rate versus pilot/data power ratio".into(),
            x_label: "p_u / q_u".into(),
            y_label: "rate (bits/s/Hz)".into(),
            x_scale: XScale::Log10,
            series: series.0,
        },
        aux: None,
        notes,
    })
}

fn power_alloc(r: &Resolved) -> Result<Report> {
    let ms = r.m_list(&[20, 50, 100, 200, 400]);
    let p_avg = r.p_avg();
    let mut base = r.system;
    r.power_default(&mut base, "p_j", db_to_linear(FIVE_DB));
    r.power_default(&mut base, "q_j", db_to_linear(FIVE_DB));
    let pilots = PilotBook::for_config(&base)?;
    let deltas = sample_deltas(&pilots, r.plan.n_sj_draws, r.plan.seed, r.plan.execution())?;
    let zf = [ReceiverSpec::ZF];
    let mut rows = Vec::new();
    let mut series = SeriesSet::default();
    let mut notes = vec!["optimal allocation assumes the jammer's powers and correlations are known: it is an upper bound".to_string()];
    for &m in &ms {
        let cfg_m = base.with_m(m).checked()?;
        let equal = PowerSplit { p_u: p_avg, q_u: p_avg }.apply(&cfg_m);
        let asy = asymptotic_power_split(cfg_m.t_coh, cfg_m.tau, p_avg)?.apply(&cfg_m);
        let sub = suboptimal_power_split(&cfg_m, p_avg)?.apply(&cfg_m);

        let mut point = |variant: &str, cfg: &SystemConfig, rates: Vec<ReceiverRates>| {
            for rr in &rates {
                series.push(format!("{} {variant}", rr.receiver), false, m as f64, Some(rr.rate.rate));
            }
            let mut out = rows_from_rates(&format!("power-alloc/{variant}"), cfg, &rates);
            rows.append(&mut out);
            rates
        };
        point(
            "equal",
            &equal,
            empirical_rates(&equal, &pilots, &[ReceiverSpec::MRC, ReceiverSpec::ZF], &r.plan)?,
        );
        let asy_rates = point("asymptotic", &asy, empirical_rates(&asy, &pilots, &zf, &r.plan)?);
        let sub_rates = point("suboptimal", &sub, empirical_rates(&sub, &pilots, &zf, &r.plan)?);

        let opt = empirical_rates_with(&pilots, &zf, &r.plan, |ctx| {
            Ok(optimal_power_split_zf(&cfg_m, &ctx.deltas, p_avg)?.apply(&cfg_m))
        })?;
        // Report the draw-averaged split for the optimal allocation.
        let splits = deltas
            .iter()
            .map(|d| optimal_power_split_zf(&cfg_m, d, p_avg))
            .collect::<Result<Vec<_>>>()?;
        let n = splits.len() as f64;
        let mean_split = PowerSplit {
            p_u: splits.iter().map(|s| s.p_u).sum::<f64>() / n,
            q_u: splits.iter().map(|s| s.q_u).sum::<f64>() / n,
        };
        let opt_rates = point("optimal-upper-bound", &mean_split.apply(&cfg_m), opt);
        notes.push(format!(
            "M={m}: zf rate optimal {:.4} / suboptimal {:.4} / asymptotic {:.4}",
            opt_rates[0].rate.rate, sub_rates[0].rate.rate, asy_rates[0].rate.rate
        ));
    }
    Ok(Report {
        rows,
        chart: Chart {
            title: "Achievable rate under different power allocations".into(),
            x_label: "M".into(),
            y_label: "rate (bits/s/Hz)".into(),
            x_scale: XScale::Linear,
            series: series.0,
        },
        aux: None,
        notes,
    })
}

fn delta_nmse(r: &Resolved) -> Result<Report> {
    let ms = r.m_list(&[50, 100, 200, 500]);
    let snrs = r.scenario.snr_db_list.clone().unwrap_or_else(|| vec![0.0, 5.0, 10.0]);
    let mut base = r.system;
    r.power_default(&mut base, "p_j", db_to_linear(FIVE_DB));
    r.power_default(&mut base, "q_j", db_to_linear(FIVE_DB));
    let pilots = PilotBook::for_config(&base)?;
    let exec = r.plan.execution();
    let mut rows = Vec::new();
    let mut aux = Vec::new();
    let mut series = SeriesSet::default();
    for &snr in &snrs {
        let p = db_to_linear(snr);
        let cfg = base.with_user_powers(p, p);
        let table = nmse_delta(&cfg, &pilots, &ms, r.plan.n_sj_draws, r.plan.seed, exec)?;
        for row in &table {
            aux.push(vec![
                p,
                row.m as f64,
                row.nmse1,
                row.nmse1_ci95,
                row.nmse2,
                row.nmse2_ci95,
                row.n_runs as f64,
            ]);
            series.push(format!("delta1 {snr} dB"), false, row.m as f64, Some(row.nmse1));
            series.push(format!("delta2 {snr} dB"), true, row.m as f64, Some(row.nmse2));
            for (source, rate) in [
                (DeltaSource::True, row.zf_rate_true),
                (DeltaSource::Estimated, row.zf_rate_estimated),
            ] {
                rows.push(ResultRow {
                    scenario: "delta-nmse".into(),
                    m: Some(row.m),
                    receiver: ReceiverSpec::ZF.to_string(),
                    mu: None,
                    p_u: cfg.p_u,
                    q_u: cfg.q_u,
                    p_j: cfg.p_j,
                    q_j: cfg.q_j,
                    delta_source: source,
                    rate_closed: Some(rate),
                    rate_mc: None,
                    ci95: None,
                    sinr_closed: None,
                    sinr_mc: None,
                });
            }
        }
    }
    Ok(Report {
        rows,
        chart: Chart {
            title: "NMSE of the correlation estimates".into(),
            x_label: "M".into(),
            y_label: "NMSE".into(),
            x_scale: XScale::Log10,
            series: series.0,
        },
        aux: Some(AuxTable {
            suffix: "nmse",
            header: vec!["p_u", "M", "nmse1", "nmse1_ci95", "nmse2", "nmse2_ci95", "n_runs"],
            rows: aux,
        }),
        notes: vec![format!("{} runs per point", r.plan.n_sj_draws)],
    })
}

/// The fixed jamming sequence used by `validate`: the first standard basis
/// vector, whose correlation with every DFT pilot is exactly `1/τ`.
pub fn validation_sequence(tau: usize) -> Result<JammerSequence> {
    let mut v = vec![C64::new(0.0, 0.0); tau];
    if let Some(first) = v.first_mut() {
        *first = C64::new(1.0, 0.0);
    }
    JammerSequence::from_vec(v)
}

fn validate(r: &Resolved) -> Result<Report> {
    let ms = r.m_list(&[32, 128, 512]);
    let receivers = r.receivers(&[ReceiverSpec::ZF, ReceiverSpec::MMSE]);
    let mut base = r.system;
    for key in ["p_u", "q_u", "p_j", "q_j"] {
        r.power_default(&mut base, key, db_to_linear(FIVE_DB));
    }
    let pilots = PilotBook::for_config(&base)?;
    let s_j = validation_sequence(base.tau)?;
    let deltas = s_j.deltas(&pilots);
    let exec: Execution = r.plan.execution();
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let mut series = SeriesSet::default();
    for &m in &ms {
        let cfg = base.with_m(m).checked()?;
        let mc = empirical_sinr_multi(&cfg, &pilots, &receivers, &s_j, r.plan.n_trials_per_sj, r.plan.seed, exec)?;
        for (rx, b) in receivers.iter().zip(&mc) {
            let closed = closed_form_sinr(&cfg, &deltas, rx)?;
            if let Some(c) = closed {
                notes.push(format!(
                    "M={m} {rx}: closed {c:.6}, simulated {:.6}, relative gap {:.4}",
                    b.sinr,
                    (b.sinr - c).abs() / c
                ));
            }
            series.push(format!("{rx} simul."), false, m as f64, Some(b.sinr));
            series.push(format!("{rx} anal."), true, m as f64, closed);
            rows.push(ResultRow {
                scenario: "validate".into(),
                m: Some(m),
                receiver: rx.to_string(),
                mu: mu_cell(rx),
                p_u: cfg.p_u,
                q_u: cfg.q_u,
                p_j: cfg.p_j,
                q_j: cfg.q_j,
                delta_source: DeltaSource::True,
                rate_closed: closed.map(|c| achievable_rate(c, cfg.tau, cfg.t_coh)),
                rate_mc: Some(achievable_rate(b.sinr, cfg.tau, cfg.t_coh)),
                ci95: None,
                sinr_closed: closed,
                sinr_mc: Some(b.sinr),
            });
        }
    }
    Ok(Report {
        rows,
        chart: Chart {
            title: "Simulated versus closed-form SINR (fixed jamming sequence)".into(),
            x_label: "M".into(),
            y_label: "SINR".into(),
            x_scale: XScale::Log10,
            series: series.0,
        },
        aux: None,
        notes,
    })
}

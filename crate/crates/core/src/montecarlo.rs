//! Monte Carlo evaluation of receiver SINR and achievable rate.
//!
//! Each trial draws fresh channels and pilot-phase noise, forms the channel
//! estimates and the receive filter `a`, and records `aᴴh`, `|aᴴg|²` and
//! `‖a‖²`. The data-symbol and data-noise expectations are taken analytically
//! (unit-power independent symbols), so the SINR is the ratio of the
//! aggregated moments
//!
//! ```text
//!   q_u |E[aᴴh]|² / ( q_u Var[aᴴh] + q_j E|aᴴg|² + σ² E‖a‖² ).
//! ```
//!
//! Trials are grouped in fixed-size chunks and the chunks are reduced in
//! index order, and every trial owns its own counter-based random stream, so
//! results do not depend on the number of worker threads. All receivers in a
//! call see the same trials (common random numbers).

use crate::analysis::{achievable_rate, closed_form_sinr, RateEstimate, Z95};
use crate::cvec;
use crate::error::{Error, Result};
use crate::estimate::{correlate_user_pilot, project_unused_pilot, raw_delta_estimates, ChannelEstimates};
use crate::exec::Execution;
use crate::model::{ChannelRealization, DeltaPair, JammerSequence, PilotBook, ReceiverSpec, SystemConfig};
use crate::receivers::build_filter;
use crate::rng::{stream, StreamKey};
use crate::simulate::pilot_phase;
use crate::C64;

/// Trials per work item. Fixed so that the reduction order never changes.
pub const CHUNK_TRIALS: usize = 64;

/// Moment-based SINR decomposition from one batch of trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrBreakdown {
    pub signal_power: f64,
    pub gain_uncertainty: f64,
    pub jamming_power: f64,
    pub noise_power: f64,
    pub sinr: f64,
    pub n_trials: usize,
}

/// Simulation budget and seeding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloPlan {
    pub n_sj_draws: usize,
    pub n_trials_per_sj: usize,
    pub seed: u64,
    /// See [`Execution::from_hint`].
    pub worker_hint: usize,
}

impl Default for MonteCarloPlan {
    fn default() -> Self {
        Self {
            n_sj_draws: 500,
            n_trials_per_sj: 2000,
            seed: 1,
            worker_hint: 0,
        }
    }
}

impl MonteCarloPlan {
    pub fn validate(&self) -> Result<()> {
        let mut issues = Vec::new();
        if self.n_sj_draws == 0 {
            issues.push(crate::error::ConfigIssue {
                field: "sj_draws",
                message: "must be >= 1".into(),
            });
        }
        if self.n_trials_per_sj < 2 {
            issues.push(crate::error::ConfigIssue {
                field: "trials",
                message: "must be >= 2 (the gain variance needs two samples)".into(),
            });
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(issues))
        }
    }

    pub fn execution(&self) -> Execution {
        Execution::from_hint(self.worker_hint)
    }
}

/// Anything that turns channel estimates into a receive filter.
pub trait FilterRule: Sync {
    fn filter(&self, est: &ChannelEstimates, config: &SystemConfig) -> Result<Vec<C64>>;
}

impl FilterRule for ReceiverSpec {
    fn filter(&self, est: &ChannelEstimates, config: &SystemConfig) -> Result<Vec<C64>> {
        Ok(build_filter(self, est, config)?.a)
    }
}

/// Adapts a closure into a [`FilterRule`].
pub struct FilterFn<F>(pub F);

impl<F> FilterRule for FilterFn<F>
where
    F: Fn(&ChannelEstimates, &SystemConfig) -> Result<Vec<C64>> + Sync,
{
    fn filter(&self, est: &ChannelEstimates, config: &SystemConfig) -> Result<Vec<C64>> {
        (self.0)(est, config)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum_ah: C64,
    sum_ah_sq: f64,
    sum_ag_sq: f64,
    sum_a_sq: f64,
    n: usize,
}

impl Moments {
    fn push(&mut self, a: &[C64], ch: &ChannelRealization) {
        let ah = cvec::dotc(a, &ch.h);
        self.sum_ah += ah;
        self.sum_ah_sq += ah.norm_sqr();
        self.sum_ag_sq += cvec::dotc(a, &ch.g).norm_sqr();
        self.sum_a_sq += cvec::norm_sqr(a);
        self.n += 1;
    }

    fn merge(&mut self, other: &Moments) {
        self.sum_ah += other.sum_ah;
        self.sum_ah_sq += other.sum_ah_sq;
        self.sum_ag_sq += other.sum_ag_sq;
        self.sum_a_sq += other.sum_a_sq;
        self.n += other.n;
    }

    fn breakdown(&self, config: &SystemConfig) -> Result<SinrBreakdown> {
        if self.n < 2 {
            return Err(Error::Domain("need at least two trials".into()));
        }
        if self.sum_a_sq <= 0.0 {
            return Err(Error::DegenerateFilter);
        }
        let n = self.n as f64;
        let mean_ah = self.sum_ah / n;
        let var_ah = ((self.sum_ah_sq - n * mean_ah.norm_sqr()) / (n - 1.0)).max(0.0);
        let signal_power = config.q_u * mean_ah.norm_sqr();
        let gain_uncertainty = config.q_u * var_ah;
        let jamming_power = config.q_j * self.sum_ag_sq / n;
        let noise_power = config.sigma2 * self.sum_a_sq / n;
        let denom = gain_uncertainty + jamming_power + noise_power;
        if denom <= 0.0 {
            return Err(Error::DegenerateFilter);
        }
        Ok(SinrBreakdown {
            signal_power,
            gain_uncertainty,
            jamming_power,
            noise_power,
            sinr: signal_power / denom,
            n_trials: self.n,
        })
    }
}

/// Core loop: `n_trials` trials under jamming sequence `s_j`, trial streams
/// keyed by `(seed, Trials{draw})`, one breakdown per rule.
#[allow(clippy::too_many_arguments)]
pub fn empirical_sinr_rules(
    config: &SystemConfig,
    pilots: &PilotBook,
    rules: &[&dyn FilterRule],
    s_j: &JammerSequence,
    n_trials: usize,
    seed: u64,
    draw: u64,
    exec: Execution,
) -> Result<Vec<SinrBreakdown>> {
    config.validate().map_err(Error::Config)?;
    if rules.is_empty() {
        return Err(Error::Domain("no receive filters requested".into()));
    }
    if n_trials < 2 {
        return Err(Error::config("trials", "must be >= 2"));
    }
    let n_chunks = n_trials.div_ceil(CHUNK_TRIALS);
    let chunks = exec.map(n_chunks, |c| -> Result<Vec<Moments>> {
        let mut acc = vec![Moments::default(); rules.len()];
        let end = ((c + 1) * CHUNK_TRIALS).min(n_trials);
        for t in c * CHUNK_TRIALS..end {
            let mut rng = stream(seed, StreamKey::Trials { draw }, t as u64);
            let ch = ChannelRealization::sample(config, &mut rng);
            let obs = pilot_phase(config, pilots, s_j, &ch, &mut rng)?;
            let est = ChannelEstimates::from_pilot(&obs, pilots, config)?;
            for (rule, m) in rules.iter().zip(acc.iter_mut()) {
                let a = rule.filter(&est, config)?;
                if a.len() != config.m {
                    return Err(Error::Dimension {
                        context: "receive filter length",
                        expected: config.m,
                        actual: a.len(),
                    });
                }
                m.push(&a, &ch);
            }
        }
        Ok(acc)
    });
    let mut total = vec![Moments::default(); rules.len()];
    for chunk in chunks {
        for (t, c) in total.iter_mut().zip(chunk?.iter()) {
            t.merge(c);
        }
    }
    total.iter().map(|m| m.breakdown(config)).collect()
}

/// Several standard receivers on common trials.
pub fn empirical_sinr_multi(
    config: &SystemConfig,
    pilots: &PilotBook,
    receivers: &[ReceiverSpec],
    s_j: &JammerSequence,
    n_trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<SinrBreakdown>> {
    let rules: Vec<&dyn FilterRule> = receivers.iter().map(|r| r as &dyn FilterRule).collect();
    exec.install(|| empirical_sinr_rules(config, pilots, &rules, s_j, n_trials, seed, 0, exec))
}

/// Empirical SINR of one receiver for a fixed jamming sequence.
pub fn empirical_sinr(
    config: &SystemConfig,
    pilots: &PilotBook,
    receiver: &ReceiverSpec,
    s_j: &JammerSequence,
    n_trials: usize,
    seed: u64,
) -> Result<SinrBreakdown> {
    let exec = Execution::default();
    empirical_sinr_multi(config, pilots, std::slice::from_ref(receiver), s_j, n_trials, seed, exec)
        .map(|mut v| v.remove(0))
}

/// Per-draw context handed to configuration callbacks.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawContext {
    pub index: usize,
    pub s_j: JammerSequence,
    pub deltas: DeltaPair,
}

/// Closed-form counterpart evaluated on the same jamming draws.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedSummary {
    pub rate: RateEstimate,
    pub mean_sinr: f64,
    pub per_draw_rate: Vec<f64>,
}

/// Rate statistics of one receiver over the jamming-sequence draws.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverRates {
    pub receiver: ReceiverSpec,
    pub rate: RateEstimate,
    pub mean_sinr: f64,
    pub per_draw_rate: Vec<f64>,
    /// `None` for receivers without a closed form.
    pub closed: Option<ClosedSummary>,
}

/// Expected rate over `plan.n_sj_draws` random jamming sequences, with the
/// system configuration chosen per draw by `config_for` (e.g. a power split
/// that depends on the draw's correlations).
pub fn empirical_rates_with<F>(
    pilots: &PilotBook,
    receivers: &[ReceiverSpec],
    plan: &MonteCarloPlan,
    config_for: F,
) -> Result<Vec<ReceiverRates>>
where
    F: Fn(&DrawContext) -> Result<SystemConfig> + Sync,
{
    plan.validate()?;
    if receivers.is_empty() {
        return Err(Error::Domain("no receivers requested".into()));
    }
    let exec = plan.execution();
    let rules: Vec<&dyn FilterRule> = receivers.iter().map(|r| r as &dyn FilterRule).collect();
    type DrawOut = (Vec<SinrBreakdown>, Vec<Option<f64>>, SystemConfig);
    let per_draw: Vec<Result<DrawOut>> = exec.install(|| {
        exec.map(plan.n_sj_draws, |k| {
            let mut rng = stream(plan.seed, StreamKey::JammerDraw, k as u64);
            let s_j = JammerSequence::sample(pilots.tau(), &mut rng)?;
            let deltas = s_j.deltas(pilots);
            let ctx = DrawContext { index: k, s_j, deltas };
            let config = config_for(&ctx)?;
            let mc = empirical_sinr_rules(
                &config,
                pilots,
                &rules,
                &ctx.s_j,
                plan.n_trials_per_sj,
                plan.seed,
                k as u64,
                exec,
            )?;
            let closed = receivers
                .iter()
                .map(|r| closed_form_sinr(&config, &deltas, r))
                .collect::<Result<Vec<_>>>()?;
            Ok((mc, closed, config))
        })
    });
    let per_draw = per_draw.into_iter().collect::<Result<Vec<_>>>()?;

    let out = receivers
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let sinrs: Vec<f64> = per_draw.iter().map(|d| d.0[i].sinr).collect();
            let rates: Vec<f64> = per_draw
                .iter()
                .zip(&sinrs)
                .map(|(d, s)| achievable_rate(*s, d.2.tau, d.2.t_coh))
                .collect();
            let closed = if per_draw.iter().all(|d| d.1[i].is_some()) {
                let cs: Vec<f64> = per_draw.iter().filter_map(|d| d.1[i]).collect();
                let cr: Vec<f64> = per_draw
                    .iter()
                    .zip(&cs)
                    .map(|(d, s)| achievable_rate(*s, d.2.tau, d.2.t_coh))
                    .collect();
                Some(ClosedSummary {
                    rate: RateEstimate::from_samples(&cr),
                    mean_sinr: mean(&cs),
                    per_draw_rate: cr,
                })
            } else {
                None
            };
            ReceiverRates {
                receiver: *r,
                rate: RateEstimate::from_samples(&rates),
                mean_sinr: mean(&sinrs),
                per_draw_rate: rates,
                closed,
            }
        })
        .collect();
    Ok(out)
}

/// Expected rate of several receivers under a fixed configuration.
pub fn empirical_rates(
    config: &SystemConfig,
    pilots: &PilotBook,
    receivers: &[ReceiverSpec],
    plan: &MonteCarloPlan,
) -> Result<Vec<ReceiverRates>> {
    config.validate().map_err(Error::Config)?;
    empirical_rates_with(pilots, receivers, plan, |_| Ok(*config))
}

/// Expected rate of one receiver under a fixed configuration.
pub fn empirical_rate(
    config: &SystemConfig,
    pilots: &PilotBook,
    receiver: &ReceiverSpec,
    plan: &MonteCarloPlan,
) -> Result<RateEstimate> {
    Ok(empirical_rates(config, pilots, std::slice::from_ref(receiver), plan)?
        .remove(0)
        .rate)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Fewest runs [`nmse_delta`] accepts.
pub const MIN_NMSE_RUNS: usize = 10;

/// Correlation-estimation accuracy at one antenna count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmseRow {
    pub m: usize,
    pub nmse1: f64,
    pub nmse1_ci95: f64,
    pub nmse2: f64,
    pub nmse2_ci95: f64,
    /// Mean closed-form ZF rate using the exact correlations.
    pub zf_rate_true: f64,
    /// Mean closed-form ZF rate using the estimated correlations.
    pub zf_rate_estimated: f64,
    pub n_runs: usize,
}

fn nmse(pairs: &[(f64, f64)]) -> (f64, f64) {
    let n = pairs.len() as f64;
    let err: Vec<f64> = pairs.iter().map(|(est, tru)| (est - tru).powi(2)).collect();
    let power = pairs.iter().map(|(_, tru)| tru * tru).sum::<f64>() / n;
    let mean_err = err.iter().sum::<f64>() / n;
    let var = err.iter().map(|e| (e - mean_err).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    if power > 0.0 {
        (mean_err / power, Z95 * (var / n).sqrt() / power)
    } else {
        (f64::NAN, f64::NAN)
    }
}

/// NMSE of the pilot-based correlation estimates versus antenna count.
///
/// The NMSE is that of the unconstrained moment estimator; the closed-form
/// rates use the clamped pair, as any downstream consumer would.
///
/// Run `r` uses jamming sequence `(seed, JammerDraw, r)` at every M, and its
/// channels/noise come from `(seed, DeltaRuns{M}, r)`; neither depends on
/// the transmit powers.
pub fn nmse_delta(
    config: &SystemConfig,
    pilots: &PilotBook,
    m_list: &[usize],
    n_runs: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<NmseRow>> {
    if n_runs < MIN_NMSE_RUNS {
        return Err(Error::config("runs", format!("must be >= {MIN_NMSE_RUNS}")));
    }
    exec.install(|| {
        m_list
            .iter()
            .map(|&m| {
                let cfg = config.with_m(m).checked()?;
                let runs = exec.map(n_runs, |r| -> Result<((f64, f64), DeltaPair)> {
                    let mut sj_rng = stream(seed, StreamKey::JammerDraw, r as u64);
                    let s_j = JammerSequence::sample(pilots.tau(), &mut sj_rng)?;
                    let mut rng = stream(seed, StreamKey::DeltaRuns { m: m as u64 }, r as u64);
                    let ch = ChannelRealization::sample(&cfg, &mut rng);
                    let obs = pilot_phase(&cfg, pilots, &s_j, &ch, &mut rng)?;
                    let y_u = correlate_user_pilot(&obs, pilots)?;
                    let y_j = project_unused_pilot(&obs, pilots)?;
                    Ok((raw_delta_estimates(&y_u, &y_j, &cfg)?, s_j.deltas(pilots)))
                });
                let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
                let (nmse1, nmse1_ci95) = nmse(&runs.iter().map(|(e, t)| (e.0, t.delta1())).collect::<Vec<_>>());
                let (nmse2, nmse2_ci95) = nmse(&runs.iter().map(|(e, t)| (e.1, t.delta2())).collect::<Vec<_>>());
                let zf_rate = |d: &DeltaPair| {
                    achievable_rate(crate::analysis::rho_zf_closed(&cfg, d), cfg.tau, cfg.t_coh)
                };
                let zf_rate_true = mean(&runs.iter().map(|(_, t)| zf_rate(t)).collect::<Vec<_>>());
                let zf_rate_estimated =
                    mean(&runs.iter().map(|(e, _)| zf_rate(&DeltaPair::clamped(e.0, e.1))).collect::<Vec<_>>());
                Ok(NmseRow {
                    m,
                    nmse1,
                    nmse1_ci95,
                    nmse2,
                    nmse2_ci95,
                    zf_rate_true,
                    zf_rate_estimated,
                    n_runs,
                })
            })
            .collect()
    })
}

/// Empirical versus closed-form SINR at one antenna count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub m: usize,
    pub sinr_mc: f64,
    pub sinr_closed: f64,
    pub relative_gap: f64,
}

/// Fixed-sequence convergence check over a list of antenna counts.
#[allow(clippy::too_many_arguments)]
pub fn convergence_report(
    config: &SystemConfig,
    pilots: &PilotBook,
    receiver: &ReceiverSpec,
    s_j: &JammerSequence,
    m_list: &[usize],
    n_trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<ConvergenceRow>> {
    let deltas = s_j.deltas(pilots);
    m_list
        .iter()
        .map(|&m| {
            let cfg = config.with_m(m).checked()?;
            let sinr_mc = empirical_sinr_multi(&cfg, pilots, std::slice::from_ref(receiver), s_j, n_trials, seed, exec)?[0].sinr;
            let sinr_closed = closed_form_sinr(&cfg, &deltas, receiver)?
                .ok_or_else(|| Error::Domain(format!("no closed form for receiver {receiver}")))?;
            Ok(ConvergenceRow {
                m,
                sinr_mc,
                sinr_closed,
                relative_gap: (sinr_mc - sinr_closed).abs() / sinr_closed,
            })
        })
        .collect()
}

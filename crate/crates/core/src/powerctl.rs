//! Pilot/data power allocation under the block energy budget
//! `τ p_u + (T − τ) q_u ≤ T P_u`.

use crate::analysis::nu;
use crate::error::{Error, Result};
use crate::model::{DeltaPair, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    pub p_u: f64,
    pub q_u: f64,
}

impl PowerSplit {
    /// Energy spent over one coherence block.
    pub fn energy(&self, tau: usize, t_coh: usize) -> f64 {
        tau as f64 * self.p_u + (t_coh - tau) as f64 * self.q_u
    }

    /// `config` with the user's powers replaced by this split.
    pub fn apply(&self, config: &SystemConfig) -> SystemConfig {
        config.with_user_powers(self.p_u, self.q_u)
    }
}

fn check_budget(t_coh: usize, tau: usize, p_avg: f64) -> Result<()> {
    if tau >= t_coh {
        return Err(Error::config("tau", "pilot length must be below the coherence block"));
    }
    if !(p_avg.is_finite() && p_avg > 0.0) {
        return Err(Error::config("p_avg", format!("must be finite and > 0, got {p_avg}")));
    }
    Ok(())
}

/// Equal-energy split, optimal as `M → ∞`.
pub fn asymptotic_power_split(t_coh: usize, tau: usize, p_avg: f64) -> Result<PowerSplit> {
    check_budget(t_coh, tau, p_avg)?;
    let energy = t_coh as f64 * p_avg;
    Ok(PowerSplit {
        p_u: energy / (2.0 * tau as f64),
        q_u: energy / (2.0 * (t_coh - tau) as f64),
    })
}

/// Maximizer of the ZF SINR on the budget line for a given `ν`.
///
/// Written without the `√(ν² + ν b E) − ν` cancellation so it stays accurate
/// when `ν` dwarfs the budget.
pub fn split_for_nu(nu: f64, config: &SystemConfig, p_avg: f64) -> Result<PowerSplit> {
    check_budget(config.t_coh, config.tau, p_avg)?;
    if !(config.beta_u > 0.0 && config.sigma2 > 0.0) {
        return Err(Error::config("beta_u", "beta_u and sigma2 must be > 0"));
    }
    let b = config.beta_u * config.sigma2;
    let be = b * config.t_coh as f64 * p_avg;
    let pilot_energy = nu * be / ((nu * nu + nu * be).sqrt() + nu) / b;
    let root = (nu + be).sqrt();
    let data_energy = root * be / (root + nu.sqrt()) / b;
    Ok(PowerSplit {
        p_u: pilot_energy / config.tau as f64,
        q_u: data_energy / (config.t_coh - config.tau) as f64,
    })
}

/// ZF-optimal split for known `(δ₁, δ₂)`. The user's current powers in
/// `config` are ignored. Needs knowledge of the jamming sequence, so the
/// resulting rate is an upper bound.
pub fn optimal_power_split_zf(config: &SystemConfig, deltas: &DeltaPair, p_avg: f64) -> Result<PowerSplit> {
    split_for_nu(nu(config, deltas), config, p_avg)
}

/// `ν̃`: `ν` with both correlations replaced by their mean `1/τ`.
pub fn suboptimal_nu(config: &SystemConfig) -> f64 {
    let c = config;
    let jam = c.p_j * c.beta_j;
    let s4 = c.sigma2 * c.sigma2;
    jam * s4 / (jam + c.sigma2) * (c.m as f64 * c.q_j * c.beta_j / (jam + c.sigma2) + 1.0) + s4
}

/// Split that needs only the jammer's powers, not its sequence.
pub fn suboptimal_power_split(config: &SystemConfig, p_avg: f64) -> Result<PowerSplit> {
    split_for_nu(suboptimal_nu(config), config, p_avg)
}

/// Brute-force maximizer on the budget line.
///
/// Evaluates `objective` at `n_points` equally spaced `q_u` in
/// `[0, T P_u/(T − τ)]` with `p_u` set by budget equality; the first
/// maximizer wins ties.
pub fn grid_search_power_split<F>(objective: F, t_coh: usize, tau: usize, p_avg: f64, n_points: usize) -> Result<PowerSplit>
where
    F: Fn(PowerSplit) -> f64,
{
    check_budget(t_coh, tau, p_avg)?;
    if n_points < 3 {
        return Err(Error::config("n_points", "grid search needs at least 3 points"));
    }
    let energy = t_coh as f64 * p_avg;
    let data_slots = (t_coh - tau) as f64;
    let q_max = energy / data_slots;
    let mut best: Option<(f64, PowerSplit)> = None;
    for i in 0..n_points {
        let q_u = q_max * i as f64 / (n_points - 1) as f64;
        let p_u = ((energy - data_slots * q_u) / tau as f64).max(0.0);
        let split = PowerSplit { p_u, q_u };
        let v = objective(split);
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, split));
        }
    }
    Ok(best.expect("n_points >= 3").1)
}

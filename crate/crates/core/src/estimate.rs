//! Channel estimation from the pilot observation.
//!
//! The legitimate channel is estimated from the correlation with the user's
//! pilot, and the jamming channel from the projection onto the reserved,
//! unused pilot, where the user's contribution cancels exactly.

use crate::cvec;
use crate::error::{Error, Result};
use crate::model::{DeltaPair, JammerSequence, PilotBook, SystemConfig};
use crate::simulate::PilotObservation;
use crate::C64;

/// Linear estimator gain for `h`: `√(τp_u) β_u / (τp_u β_u + p_j β_j + σ²)`.
pub fn eta_u(config: &SystemConfig) -> f64 {
    let tp = config.tau as f64 * config.p_u;
    tp.sqrt() * config.beta_u / (tp * config.beta_u + config.p_j * config.beta_j + config.sigma2)
}

/// Normalization of the jamming-channel estimate: `1/√(p_j β_j + σ²)`.
pub fn eta_j(config: &SystemConfig) -> f64 {
    1.0 / (config.p_j * config.beta_j + config.sigma2).sqrt()
}

/// `ĥ`, `ĝ` and the deterministic gains used to form them.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimates {
    pub h_hat: Vec<C64>,
    pub g_hat: Vec<C64>,
    pub eta_u: f64,
    pub eta_j: f64,
}

impl ChannelEstimates {
    pub fn from_projections(y_u: &[C64], y_j: &[C64], config: &SystemConfig) -> Result<Self> {
        Ok(Self {
            h_hat: estimate_user_channel(y_u, config)?,
            g_hat: estimate_jammer_channel(y_j, config)?,
            eta_u: eta_u(config),
            eta_j: eta_j(config),
        })
    }

    pub fn from_pilot(obs: &PilotObservation, pilots: &PilotBook, config: &SystemConfig) -> Result<Self> {
        let y_u = correlate_user_pilot(obs, pilots)?;
        let y_j = project_unused_pilot(obs, pilots)?;
        Self::from_projections(&y_u, &y_j, config)
    }

    pub fn m(&self) -> usize {
        self.h_hat.len()
    }
}

/// Coefficients of `ĥ = α₁h + α₂g + n₁` and `ĝ = α₃g + n₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingCoefficients {
    pub alpha1: f64,
    pub alpha2: C64,
    pub alpha3: C64,
}

pub fn mixing_coefficients(config: &SystemConfig, pilots: &PilotBook, s_j: &JammerSequence) -> MixingCoefficients {
    let tau = config.tau as f64;
    let eu = eta_u(config);
    let ej = eta_j(config);
    MixingCoefficients {
        alpha1: eu * (tau * config.p_u).sqrt(),
        alpha2: s_j.correlation(pilots.used()) * (eu * (tau * config.p_j).sqrt()),
        alpha3: s_j.correlation(pilots.unused()) * (ej * (tau * config.p_j).sqrt()),
    }
}

fn check_pilot_dims(obs: &PilotObservation, pilots: &PilotBook) -> Result<()> {
    if obs.y_t.cols() != pilots.tau() {
        return Err(Error::Dimension {
            context: "pilot observation columns",
            expected: pilots.tau(),
            actual: obs.y_t.cols(),
        });
    }
    Ok(())
}

/// `y_u = Y_t s_u*`
pub fn correlate_user_pilot(obs: &PilotObservation, pilots: &PilotBook) -> Result<Vec<C64>> {
    check_pilot_dims(obs, pilots)?;
    Ok(obs.y_t.mul_conj(pilots.used()))
}

/// `y_j = Y_t s_ū*`
pub fn project_unused_pilot(obs: &PilotObservation, pilots: &PilotBook) -> Result<Vec<C64>> {
    check_pilot_dims(obs, pilots)?;
    Ok(obs.y_t.mul_conj(pilots.unused()))
}

fn check_m(context: &'static str, config: &SystemConfig, v: &[C64]) -> Result<()> {
    if v.len() != config.m {
        return Err(Error::Dimension {
            context,
            expected: config.m,
            actual: v.len(),
        });
    }
    Ok(())
}

/// `ĥ = η_u y_u`
pub fn estimate_user_channel(y_u: &[C64], config: &SystemConfig) -> Result<Vec<C64>> {
    check_m("user projection length", config, y_u)?;
    Ok(cvec::scaled(y_u, eta_u(config)))
}

/// `ĝ = η_j y_j`
pub fn estimate_jammer_channel(y_j: &[C64], config: &SystemConfig) -> Result<Vec<C64>> {
    check_m("unused-pilot projection length", config, y_j)?;
    Ok(cvec::scaled(y_j, eta_j(config)))
}

/// Unconstrained moment estimates `(δ̂₁, δ̂₂)`, obtained by inverting
/// `E‖y_u‖²/M = τp_uβ_u + τp_jβ_jδ₁ + σ²` and `E‖y_j‖²/M = τp_jβ_jδ₂ + σ²`.
///
/// Each component depends only on its own projection, so `δ̂₂` is unaffected
/// by the user's powers. Needs `p_j β_j > 0`.
pub fn raw_delta_estimates(y_u: &[C64], y_j: &[C64], config: &SystemConfig) -> Result<(f64, f64)> {
    check_m("user projection length", config, y_u)?;
    check_m("unused-pilot projection length", config, y_j)?;
    let jam = config.tau as f64 * config.p_j * config.beta_j;
    if jam.is_nan() || jam <= 0.0 {
        return Err(Error::EstimationUnavailable);
    }
    let m = config.m as f64;
    let d1 = (cvec::norm_sqr(y_u) / m - config.tau as f64 * config.p_u * config.beta_u - config.sigma2) / jam;
    let d2 = (cvec::norm_sqr(y_j) / m - config.sigma2) / jam;
    Ok((d1, d2))
}

/// [`raw_delta_estimates`] projected onto valid correlations: clamped at
/// zero and rescaled onto `δ₁ + δ₂ = 1` when they overshoot.
pub fn estimate_deltas(y_u: &[C64], y_j: &[C64], config: &SystemConfig) -> Result<DeltaPair> {
    let (d1, d2) = raw_delta_estimates(y_u, y_j, config)?;
    Ok(DeltaPair::clamped(d1, d2))
}

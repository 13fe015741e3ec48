//! Linear receive filters built from the channel estimates.
//!
//! RZF, MMSE-type and ZF-type filters are all evaluated in the rank-one form
//! `(I − ĝĝᴴ/(μ + ‖ĝ‖²)) ĥ`, which differs from `(ĝĝᴴ + μI)⁻¹ĥ` only by the
//! positive factor `1/μ` and costs O(M).

use crate::cvec;
use crate::error::{Error, Result};
use crate::estimate::{eta_j, eta_u, ChannelEstimates};
use crate::model::{ReceiverKind, ReceiverSpec, SystemConfig};
use crate::simulate::DataObservation;
use crate::C64;

/// Below this `‖ĝ‖²` there is no usable jamming direction and ZF falls back to MRC.
pub const DEGENERATE_JAMMER_NORM_SQR: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq)]
pub struct ReceiveFilter {
    pub a: Vec<C64>,
    pub spec: ReceiverSpec,
}

pub fn mrc_filter(est: &ChannelEstimates) -> ReceiveFilter {
    ReceiveFilter {
        a: est.h_hat.clone(),
        spec: ReceiverSpec::MRC,
    }
}

fn project_out(est: &ChannelEstimates, denom: f64) -> Vec<C64> {
    let coef = cvec::dotc(&est.g_hat, &est.h_hat) / denom;
    let mut a = est.h_hat.clone();
    cvec::axpy(-coef, &est.g_hat, &mut a);
    a
}

/// `(I − ĝĝᴴ/‖ĝ‖²) ĥ`, or `ĥ` when `ĝ` is numerically zero.
pub fn zf_filter(est: &ChannelEstimates) -> ReceiveFilter {
    let gg = cvec::norm_sqr(&est.g_hat);
    let a = if gg < DEGENERATE_JAMMER_NORM_SQR {
        est.h_hat.clone()
    } else {
        project_out(est, gg)
    };
    ReceiveFilter {
        a,
        spec: ReceiverSpec::ZF,
    }
}

/// `(I − ĝĝᴴ/(μ + ‖ĝ‖²)) ĥ`; `μ = 0` is the ZF-type filter.
pub fn rzf_filter(est: &ChannelEstimates, mu: f64) -> Result<ReceiveFilter> {
    let spec = ReceiverSpec::rzf(mu)?;
    let a = if mu == 0.0 {
        zf_filter(est).a
    } else {
        project_out(est, mu + cvec::norm_sqr(&est.g_hat))
    };
    Ok(ReceiveFilter { a, spec })
}

/// Equivalent estimation-error-plus-noise variance `σ_e²`.
pub fn equivalent_noise_variance(config: &SystemConfig) -> f64 {
    let tau = config.tau as f64;
    let eu = eta_u(config);
    let ej2 = eta_j(config).powi(2);
    config.q_u * config.beta_u * (1.0 - eu * (tau * config.p_u).sqrt())
        + config.q_j * (config.beta_j * (1.0 + ej2 * config.p_j) + ej2 * config.sigma2)
        + config.sigma2
}

/// Regularization of the MMSE-type receiver, `σ_e²/q_j`.
pub fn mmse_mu(config: &SystemConfig) -> Result<f64> {
    if config.q_j.is_nan() || config.q_j <= 0.0 {
        return Err(Error::MmseUndefined);
    }
    Ok(equivalent_noise_variance(config) / config.q_j)
}

/// Builds the filter selected by `spec`.
pub fn build_filter(spec: &ReceiverSpec, est: &ChannelEstimates, config: &SystemConfig) -> Result<ReceiveFilter> {
    match spec.kind {
        ReceiverKind::Mrc => Ok(mrc_filter(est)),
        ReceiverKind::Zf => Ok(zf_filter(est)),
        ReceiverKind::Rzf => rzf_filter(est, spec.mu),
        ReceiverKind::Mmse => {
            let mu = mmse_mu(config)?;
            let mut f = rzf_filter(est, mu)?;
            f.spec = ReceiverSpec::MMSE;
            Ok(f)
        }
    }
}

/// `y = aᴴ y_d`
pub fn apply_filter(filter: &ReceiveFilter, obs: &DataObservation) -> Result<C64> {
    if filter.a.len() != obs.y_d.len() {
        return Err(Error::Dimension {
            context: "receive filter length",
            expected: obs.y_d.len(),
            actual: filter.a.len(),
        });
    }
    Ok(cvec::dotc(&filter.a, &obs.y_d))
}

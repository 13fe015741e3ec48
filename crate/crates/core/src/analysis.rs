//! Closed-form large-scale SINR approximations and rates.
//!
//! All closed forms depend on the jamming sequence only through the pair
//! `(δ₁, δ₂)` and on `γ_j = τ p_j δ₂ β_j + σ²`.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{DeltaPair, JammerSequence, PilotBook, ReceiverKind, ReceiverSpec, SystemConfig};
use crate::receivers::mmse_mu;
use crate::rng::{stream, StreamKey};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormInputs {
    pub config: SystemConfig,
    pub deltas: DeltaPair,
    pub mu: f64,
}

/// `γ_j = τ p_j δ₂ β_j + σ²`
pub fn gamma_j(config: &SystemConfig, deltas: &DeltaPair) -> f64 {
    config.tau as f64 * config.p_j * deltas.delta2() * config.beta_j + config.sigma2
}

fn eta_j_sqr(config: &SystemConfig) -> f64 {
    1.0 / (config.p_j * config.beta_j + config.sigma2)
}

/// Large-scale SINR of the RZF receiver, with the `μ/M` terms retained.
pub fn rho_rzf_closed(inputs: &ClosedFormInputs) -> f64 {
    let c = &inputs.config;
    let d = &inputs.deltas;
    let m = c.m as f64;
    let tau = c.tau as f64;
    let s2 = c.sigma2;
    let ej2 = eta_j_sqr(c);
    let gj = gamma_j(c, d);
    let x = inputs.mu / m;
    let inner = x + ej2 * s2;
    let outer = x + ej2 * gj;
    let ratio = inner / outer;

    let signal = tau * c.p_u * c.q_u * c.beta_u.powi(2);
    let jamming = m * tau * c.p_j * c.q_j * d.delta1() * c.beta_j.powi(2) * ratio * ratio;
    let leak = tau * c.p_j * d.delta1() * c.beta_j
        * (tau * c.p_j * d.delta2() * ej2 * ej2 * s2 * c.beta_j + inner * inner)
        / (outer * outer);
    let noise = s2 * (tau * c.p_u * c.beta_u + s2 + leak);
    m * signal / (signal + jamming + noise)
}

/// ZF-type large-scale SINR.
pub fn rho_zf_closed(config: &SystemConfig, deltas: &DeltaPair) -> f64 {
    let c = config;
    let m = c.m as f64;
    let tau = c.tau as f64;
    let s2 = c.sigma2;
    let gj = gamma_j(c, deltas);
    let signal = tau * c.p_u * c.q_u * c.beta_u.powi(2);
    let jamming = m * tau * c.p_j * c.q_j * deltas.delta1() * c.beta_j.powi(2) * s2 * s2 / (gj * gj);
    let noise = s2 * (tau * c.p_u * c.beta_u + s2 + tau * c.p_j * deltas.delta1() * c.beta_j * s2 / gj);
    m * signal / (signal + jamming + noise)
}

/// The power-independent part of the ZF denominator:
/// `ν = (τ p_j β_j δ₁ σ⁴/γ_j)(M q_j β_j/γ_j + 1) + σ⁴`.
pub fn nu(config: &SystemConfig, deltas: &DeltaPair) -> f64 {
    let c = config;
    let s4 = c.sigma2 * c.sigma2;
    let gj = gamma_j(c, deltas);
    (c.tau as f64 * c.p_j * c.beta_j * deltas.delta1() * s4 / gj) * (c.m as f64 * c.q_j * c.beta_j / gj + 1.0)
        + s4
}

/// ZF-type SINR written through `ν`:
/// `Mτβ_u² p_u q_u / (τβ_u² p_u q_u + τβ_u σ² p_u + ν)`.
pub fn rho_zf_nu_form(config: &SystemConfig, deltas: &DeltaPair) -> f64 {
    let c = config;
    let tau = c.tau as f64;
    let pq = tau * c.beta_u.powi(2) * c.p_u * c.q_u;
    c.m as f64 * pq / (pq + tau * c.beta_u * c.sigma2 * c.p_u + nu(c, deltas))
}

/// MMSE-type SINR: the RZF form at `μ = σ_e²/q_j`.
pub fn rho_mmse_closed(config: &SystemConfig, deltas: &DeltaPair) -> Result<f64> {
    let mu = mmse_mu(config)?;
    Ok(rho_rzf_closed(&ClosedFormInputs {
        config: *config,
        deltas: *deltas,
        mu,
    }))
}

/// Limit of the RZF/ZF/MMSE SINR as `M → ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AsymptoticSinr {
    Finite(f64),
    /// No jamming reaches the data phase after combining (`δ₁ p_j q_j = 0`).
    Unbounded,
}

impl AsymptoticSinr {
    pub fn finite(self) -> Option<f64> {
        match self {
            AsymptoticSinr::Finite(v) => Some(v),
            AsymptoticSinr::Unbounded => None,
        }
    }
}

/// `ρ_asy = (γ_j²/(δ₁σ⁴)) · p_u q_u β_u² / (p_j q_j β_j²)`
pub fn rho_asymptotic(config: &SystemConfig, deltas: &DeltaPair) -> AsymptoticSinr {
    let c = config;
    let user = c.p_u * c.q_u * c.beta_u.powi(2);
    if user == 0.0 {
        return AsymptoticSinr::Finite(0.0);
    }
    let jam = deltas.delta1() * c.p_j * c.q_j * c.beta_j.powi(2);
    if jam == 0.0 {
        return AsymptoticSinr::Unbounded;
    }
    let gj = gamma_j(c, deltas);
    AsymptoticSinr::Finite(gj * gj / (c.sigma2 * c.sigma2) * user / jam)
}

/// `Mτp_u q_u β_u² (1/ρ_RZF − 1/ρ_ZF)` in its factored, manifestly
/// nonnegative form. Every term carries `γ_j − σ²` and vanishes at `μ = 0`.
pub fn rzf_zf_gap(config: &SystemConfig, deltas: &DeltaPair, mu: f64) -> f64 {
    let c = config;
    let m = c.m as f64;
    let tau = c.tau as f64;
    let s2 = c.sigma2;
    let ej2 = eta_j_sqr(c);
    let gj = gamma_j(c, deltas);
    let x = mu / m;
    let outer = x + ej2 * gj;
    let excess = gj - s2;
    let jam = tau * c.p_j * c.q_j * deltas.delta1() * c.beta_j.powi(2) * mu * excess / (gj * outer)
        * ((x + ej2 * s2) / outer + s2 / gj);
    let noise = tau * c.p_j * deltas.delta1() * c.beta_j * s2 * (excess / gj) * (x / outer).powi(2);
    jam + noise
}

/// Same quantity as [`rzf_zf_gap`], computed as the plain difference of the
/// two closed forms.
pub fn rzf_zf_gap_direct(config: &SystemConfig, deltas: &DeltaPair, mu: f64) -> f64 {
    let c = config;
    let scale = c.m as f64 * c.tau as f64 * c.p_u * c.q_u * c.beta_u.powi(2);
    let rzf = rho_rzf_closed(&ClosedFormInputs {
        config: *c,
        deltas: *deltas,
        mu,
    });
    scale * (1.0 / rzf - 1.0 / rho_zf_closed(c, deltas))
}

/// Limit of the ZF SINR when `p_j = λ q_j → ∞`.
pub fn strong_jamming_limit_zf(config: &SystemConfig, lambda: f64, deltas: &DeltaPair) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda must be finite and > 0, got {lambda}")));
    }
    let (d1, d2) = (deltas.delta1(), deltas.delta2());
    if d2 == 0.0 {
        return Err(Error::Domain("strong-jamming limit needs delta2 > 0".into()));
    }
    let c = config;
    let m = c.m as f64;
    let tau = c.tau as f64;
    let s2 = c.sigma2;
    let signal = tau * c.p_u * c.q_u * c.beta_u.powi(2);
    let jamming = m * d1 * s2 * s2 / (lambda * tau * d2 * d2);
    let noise = s2 * (tau * c.p_u * c.beta_u + s2 + d1 / d2 * s2);
    Ok(m * signal / (signal + jamming + noise))
}

/// `(1 − τ/T) log₂(1 + sinr)` in bits per symbol.
pub fn achievable_rate(sinr: f64, tau: usize, t_coh: usize) -> f64 {
    (1.0 - tau as f64 / t_coh as f64) * (1.0 + sinr).log2()
}

/// Closed-form SINR for `receiver`; `None` for MRC, which has no closed form here.
pub fn closed_form_sinr(config: &SystemConfig, deltas: &DeltaPair, receiver: &ReceiverSpec) -> Result<Option<f64>> {
    Ok(match receiver.kind {
        ReceiverKind::Mrc => None,
        ReceiverKind::Zf => Some(rho_zf_closed(config, deltas)),
        ReceiverKind::Mmse => Some(rho_mmse_closed(config, deltas)?),
        ReceiverKind::Rzf => Some(rho_rzf_closed(&ClosedFormInputs {
            config: *config,
            deltas: *deltas,
            mu: receiver.mu,
        })),
    })
}

/// Sample mean with a normal 95% half-width (NaN below two samples).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub rate: f64,
    pub ci95: f64,
    pub n: usize,
}

impl RateEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let ci95 = if n < 2 {
            f64::NAN
        } else {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            Z95 * (var / n as f64).sqrt()
        };
        Self { rate: mean, ci95, n }
    }
}

/// Average closed-form rate over the given correlation pairs.
pub fn rate_from_deltas(config: &SystemConfig, receiver: &ReceiverSpec, deltas: &[DeltaPair]) -> Result<RateEstimate> {
    if deltas.is_empty() {
        return Err(Error::Domain("need at least one correlation pair".into()));
    }
    let rates = deltas
        .iter()
        .map(|d| {
            let sinr = closed_form_sinr(config, d, receiver)?
                .ok_or_else(|| Error::Domain(format!("no closed form for receiver {receiver}")))?;
            Ok(achievable_rate(sinr, config.tau, config.t_coh))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateEstimate::from_samples(&rates))
}

/// Draws `n` jamming sequences from the `(seed, JammerDraw)` streams and
/// returns their exact correlation pairs, in draw order.
pub fn sample_deltas(pilots: &PilotBook, n: usize, seed: u64, exec: Execution) -> Result<Vec<DeltaPair>> {
    exec.map(n, |k| {
        let mut rng = stream(seed, StreamKey::JammerDraw, k as u64);
        Ok(JammerSequence::sample(pilots.tau(), &mut rng)?.deltas(pilots))
    })
    .into_iter()
    .collect()
}

/// Closed-form rate averaged over `n_sj_draws` uniform jamming sequences.
pub fn expected_rate_closed(
    config: &SystemConfig,
    pilots: &PilotBook,
    receiver: &ReceiverSpec,
    n_sj_draws: usize,
    seed: u64,
) -> Result<RateEstimate> {
    if n_sj_draws == 0 {
        return Err(Error::config("n_sj_draws", "must be >= 1"));
    }
    let deltas = sample_deltas(pilots, n_sj_draws, seed, Execution::default())?;
    rate_from_deltas(config, receiver, &deltas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn third() -> DeltaPair {
        DeltaPair::new(1.0 / 3.0, 1.0 / 3.0).unwrap()
    }

    #[test]
    fn hand_instance_values() {
        let cfg = SystemConfig::default();
        assert_relative_eq!(gamma_j(&cfg, &third()), 2.0, max_relative = 1e-15);
        assert_relative_eq!(rho_zf_closed(&cfg, &third()), 300.0 / 32.5, max_relative = 1e-13);
        assert_relative_eq!(nu(&cfg, &third()), 26.5, max_relative = 1e-13);
        assert_relative_eq!(rho_zf_nu_form(&cfg, &third()), 300.0 / 32.5, max_relative = 1e-13);
        let asy = rho_asymptotic(&cfg, &third()).finite().unwrap();
        assert_relative_eq!(asy, 12.0, max_relative = 1e-13);
        // Independent mpmath evaluation of the MMSE-type closed form.
        assert_relative_eq!(
            rho_mmse_closed(&cfg, &third()).unwrap(),
            8.779_201_709_009_437,
            max_relative = 1e-12
        );
        assert_relative_eq!(rzf_zf_gap(&cfg, &third(), 1.0), 0.497_549_259_876_483_6, max_relative = 1e-12);
    }

    #[test]
    fn rzf_at_zero_mu_is_zf() {
        let cfg = SystemConfig::default().with_m(57).with_user_powers(2.0, 0.7).with_jammer_powers(4.0, 3.0);
        let d = DeltaPair::new(0.2, 0.5).unwrap();
        let rzf = rho_rzf_closed(&ClosedFormInputs {
            config: cfg,
            deltas: d,
            mu: 0.0,
        });
        assert_relative_eq!(rzf, rho_zf_closed(&cfg, &d), max_relative = 1e-12);
        assert_eq!(rzf_zf_gap(&cfg, &d, 0.0), 0.0);
    }

    #[test]
    fn zero_user_power_gives_zero_sinr() {
        let d = third();
        let cfg = SystemConfig::default().with_user_powers(1.0, 0.0);
        assert_eq!(
            rho_rzf_closed(&ClosedFormInputs {
                config: cfg,
                deltas: d,
                mu: 2.0
            }),
            0.0
        );
        let cfg = SystemConfig::default().with_user_powers(0.0, 1.0);
        assert_eq!(rho_asymptotic(&cfg, &d), AsymptoticSinr::Finite(0.0));
    }

    #[test]
    fn silent_jammer_pilot_reduces_zf() {
        let cfg = SystemConfig::default().with_jammer_powers(0.0, 5.0).with_user_powers(2.0, 3.0);
        let m = cfg.m as f64;
        let expect = m * 3.0 * 6.0 / (3.0 * 6.0 + 1.0 * (3.0 * 2.0 + 1.0));
        assert_relative_eq!(rho_zf_closed(&cfg, &third()), expect, max_relative = 1e-13);
    }

    #[test]
    fn strong_data_jamming_kills_zf() {
        let cfg = SystemConfig::default();
        let weak = rho_zf_closed(&cfg.with_jammer_powers(1.0, 1e12), &third());
        assert!(weak < 1e-6, "{weak}");
    }

    #[test]
    fn asymptotic_unbounded_without_jamming() {
        let cfg = SystemConfig::default();
        assert_eq!(
            rho_asymptotic(&cfg, &DeltaPair::new(0.0, 0.5).unwrap()),
            AsymptoticSinr::Unbounded
        );
        assert_eq!(
            rho_asymptotic(&cfg.with_jammer_powers(1.0, 0.0), &third()),
            AsymptoticSinr::Unbounded
        );
    }

    #[test]
    fn asymptotic_increases_with_pilot_jamming_above_threshold() {
        let cfg = SystemConfig::default();
        let d = third();
        let threshold = 1.0 / (9.0 * d.delta2() * d.delta2());
        let mut last = 0.0;
        for k in 1..20 {
            let p_j = threshold * (1.0 + k as f64 * 0.5);
            let v = rho_asymptotic(&cfg.with_jammer_powers(p_j, 1.0), &d).finite().unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn strong_jamming_limit_errors() {
        let cfg = SystemConfig::default();
        assert!(strong_jamming_limit_zf(&cfg, 0.0, &third()).is_err());
        assert!(strong_jamming_limit_zf(&cfg, 1.0, &DeltaPair::new(0.5, 0.0).unwrap()).is_err());
        assert!(strong_jamming_limit_zf(&cfg, 1.0, &third()).unwrap() > 0.0);
    }

    #[test]
    fn rate_values() {
        assert_eq!(achievable_rate(0.0, 3, 200), 0.0);
        assert_relative_eq!(achievable_rate(1.0, 3, 200), 0.985, max_relative = 1e-15);
        // mpmath: 0.985 * log2(1 + 300/32.5)
        assert_relative_eq!(
            achievable_rate(300.0 / 32.5, 3, 200),
            3.304_520_076_599_696,
            max_relative = 1e-12
        );
    }

    #[test]
    fn single_forced_draw_is_the_point_rate() {
        let cfg = SystemConfig::default();
        let r = rate_from_deltas(&cfg, &ReceiverSpec::ZF, &[third()]).unwrap();
        assert_eq!(r.n, 1);
        assert!(r.ci95.is_nan());
        assert_relative_eq!(r.rate, achievable_rate(300.0 / 32.5, 3, 200), max_relative = 1e-14);
        assert!(rate_from_deltas(&cfg, &ReceiverSpec::MRC, &[third()]).is_err());
    }
}

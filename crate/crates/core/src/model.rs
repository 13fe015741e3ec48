//! Domain types: system configuration, pilot codebook, jamming sequence,
//! channel draws and receiver selection.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::cvec;
use crate::error::{ConfigIssue, Error, Result};
use crate::rng::complex_normal_vec;
use crate::C64;

/// Scalar parameters of the uplink.
///
/// Powers are per symbol and linear; `p_*` apply to the pilot phase and
/// `q_*` to the data phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// BS antenna count.
    pub m: usize,
    /// Coherence block length in symbols.
    pub t_coh: usize,
    /// Pilot length in symbols.
    pub tau: usize,
    pub beta_u: f64,
    pub beta_j: f64,
    pub sigma2: f64,
    pub p_u: f64,
    pub q_u: f64,
    pub p_j: f64,
    pub q_j: f64,
}

impl Default for SystemConfig {
    /// `T = 200`, `τ = 3`, unit fading and noise, all powers 0 dB, `M = 100`.
    fn default() -> Self {
        Self {
            m: 100,
            t_coh: 200,
            tau: 3,
            beta_u: 1.0,
            beta_j: 1.0,
            sigma2: 1.0,
            p_u: 1.0,
            q_u: 1.0,
            p_j: 1.0,
            q_j: 1.0,
        }
    }
}

impl SystemConfig {
    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn with_user_powers(mut self, p_u: f64, q_u: f64) -> Self {
        self.p_u = p_u;
        self.q_u = q_u;
        self
    }

    pub fn with_jammer_powers(mut self, p_j: f64, q_j: f64) -> Self {
        self.p_j = p_j;
        self.q_j = q_j;
        self
    }

    /// Sets all four transmit powers to the same linear value.
    pub fn with_all_powers(self, p: f64) -> Self {
        self.with_user_powers(p, p).with_jammer_powers(p, p)
    }

    /// Pre-log factor `1 − τ/T`.
    pub fn prelog(&self) -> f64 {
        1.0 - self.tau as f64 / self.t_coh as f64
    }

    /// Every violated invariant, each naming its field.
    pub fn validate(&self) -> std::result::Result<(), Vec<ConfigIssue>> {
        let mut issues = Vec::new();
        if self.m == 0 {
            issues.push(ConfigIssue::new("m", "antenna count must be positive"));
        }
        if self.t_coh == 0 {
            issues.push(ConfigIssue::new("t_coh", "coherence block must be positive"));
        }
        if self.tau < 2 {
            issues.push(ConfigIssue::new(
                "tau",
                format!("pilot length {} leaves no unused pilot (need tau >= 2)", self.tau),
            ));
        }
        if self.tau >= self.t_coh {
            issues.push(ConfigIssue::new(
                "tau",
                format!(
                    "pilot length {} must be below the coherence block {} (pre-log 1 - tau/T must be positive)",
                    self.tau, self.t_coh
                ),
            ));
        }
        for (field, v) in [
            ("beta_u", self.beta_u),
            ("beta_j", self.beta_j),
            ("sigma2", self.sigma2),
        ] {
            if !(v.is_finite() && v > 0.0) {
                issues.push(ConfigIssue::new(field, format!("must be finite and > 0, got {v}")));
            }
        }
        for (field, v) in [
            ("p_u", self.p_u),
            ("q_u", self.q_u),
            ("p_j", self.p_j),
            ("q_j", self.q_j),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                issues.push(ConfigIssue::new(field, format!("must be finite and >= 0, got {v}")));
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }

    pub fn checked(self) -> Result<Self> {
        self.validate().map_err(Error::Config)?;
        Ok(self)
    }
}

/// Orthonormal pilot codebook with one used and one unused sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotBook {
    sequences: Vec<Vec<C64>>,
    used_index: usize,
    unused_index: usize,
}

impl PilotBook {
    /// Unit-norm columns of the `tau`-point DFT matrix.
    pub fn dft(tau: usize, used_index: usize, unused_index: usize) -> Result<Self> {
        if tau < 2 {
            return Err(Error::config("tau", "pilot codebook needs tau >= 2"));
        }
        if used_index >= tau {
            return Err(Error::config("used_index", format!("{used_index} out of range for tau={tau}")));
        }
        if unused_index >= tau {
            return Err(Error::config(
                "unused_index",
                format!("{unused_index} out of range for tau={tau}"),
            ));
        }
        if used_index == unused_index {
            return Err(Error::config("unused_index", "must differ from used_index"));
        }
        let scale = 1.0 / (tau as f64).sqrt();
        let sequences = (0..tau)
            .map(|k| {
                (0..tau)
                    .map(|n| {
                        let angle = -2.0 * PI * ((n * k) % tau) as f64 / tau as f64;
                        C64::from_polar(scale, angle)
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            sequences,
            used_index,
            unused_index,
        })
    }

    /// The default book for `config`: user on pilot 0, unused pilot 1.
    pub fn for_config(config: &SystemConfig) -> Result<Self> {
        Self::dft(config.tau, 0, 1)
    }

    pub fn tau(&self) -> usize {
        self.sequences.len()
    }

    pub fn sequences(&self) -> &[Vec<C64>] {
        &self.sequences
    }

    pub fn used_index(&self) -> usize {
        self.used_index
    }

    pub fn unused_index(&self) -> usize {
        self.unused_index
    }

    /// The user's pilot `s_u`.
    pub fn used(&self) -> &[C64] {
        &self.sequences[self.used_index]
    }

    /// The reserved pilot `s_ū`.
    pub fn unused(&self) -> &[C64] {
        &self.sequences[self.unused_index]
    }
}

/// Unit-norm jamming pilot sequence `s_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct JammerSequence {
    s: Vec<C64>,
}

impl JammerSequence {
    /// Uniform draw on the complex unit sphere (normalized Gaussian vector).
    pub fn sample<R: Rng + ?Sized>(tau: usize, rng: &mut R) -> Result<Self> {
        if tau == 0 {
            return Err(Error::config("tau", "jamming sequence length must be positive"));
        }
        loop {
            let v = complex_normal_vec(rng, 1.0, tau);
            if cvec::norm_sqr(&v) > 0.0 {
                return Self::from_vec(v);
            }
        }
    }

    /// Normalizes `v` to unit norm.
    pub fn from_vec(v: Vec<C64>) -> Result<Self> {
        let n2 = cvec::norm_sqr(&v);
        if !(n2.is_finite() && n2 > 0.0) {
            return Err(Error::Domain("jamming sequence must be finite and nonzero".into()));
        }
        Ok(Self {
            s: cvec::scaled(&v, 1.0 / n2.sqrt()),
        })
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.s
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// `s_jᵀ s*`
    pub fn correlation(&self, s: &[C64]) -> C64 {
        self.s
            .iter()
            .zip(s)
            .fold(C64::new(0.0, 0.0), |acc, (a, b)| acc + a * b.conj())
    }

    /// Exact `(δ₁, δ₂)` against the used and unused pilots.
    pub fn deltas(&self, book: &PilotBook) -> DeltaPair {
        let d1 = self.correlation(book.used()).norm_sqr();
        let d2 = self.correlation(book.unused()).norm_sqr();
        DeltaPair::clamped(d1, d2)
    }
}

/// Squared correlations of `s_j` with the used (`δ₁`) and unused (`δ₂`) pilots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaPair {
    delta1: f64,
    delta2: f64,
}

impl DeltaPair {
    const SUM_SLACK: f64 = 1e-9;

    pub fn new(delta1: f64, delta2: f64) -> Result<Self> {
        let ok = delta1.is_finite()
            && delta2.is_finite()
            && delta1 >= 0.0
            && delta2 >= 0.0
            && delta1 + delta2 <= 1.0 + Self::SUM_SLACK;
        if !ok {
            return Err(Error::Domain(format!(
                "invalid correlation pair (delta1={delta1}, delta2={delta2})"
            )));
        }
        Ok(Self { delta1, delta2 })
    }

    /// Projects arbitrary finite values onto the valid set: negatives go to
    /// zero, and a pair summing above one is rescaled onto the simplex edge.
    pub fn clamped(delta1: f64, delta2: f64) -> Self {
        let d1 = if delta1.is_finite() { delta1.max(0.0) } else { 0.0 };
        let d2 = if delta2.is_finite() { delta2.max(0.0) } else { 0.0 };
        let sum = d1 + d2;
        if sum > 1.0 {
            Self {
                delta1: d1 / sum,
                delta2: d2 / sum,
            }
        } else {
            Self {
                delta1: d1,
                delta2: d2,
            }
        }
    }

    /// `E{δ₁} = E{δ₂} = 1/τ` for a uniform jamming sequence.
    pub fn mean(tau: usize) -> Self {
        let d = 1.0 / tau as f64;
        Self {
            delta1: d,
            delta2: d,
        }
    }

    pub fn delta1(&self) -> f64 {
        self.delta1
    }

    pub fn delta2(&self) -> f64 {
        self.delta2
    }
}

/// One draw of the legitimate channel `h` and jamming channel `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: Vec<C64>,
    pub g: Vec<C64>,
}

impl ChannelRealization {
    /// `h ~ CN(0, β_u I)`, then `g ~ CN(0, β_j I)` from the same stream.
    pub fn sample<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R) -> Self {
        let h = complex_normal_vec(rng, config.beta_u, config.m);
        let g = complex_normal_vec(rng, config.beta_j, config.m);
        Self { h, g }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReceiverKind {
    Mrc,
    Zf,
    Mmse,
    Rzf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverSpec {
    pub kind: ReceiverKind,
    /// Regularization; only read for [`ReceiverKind::Rzf`].
    pub mu: f64,
}

impl ReceiverSpec {
    pub const MRC: Self = Self {
        kind: ReceiverKind::Mrc,
        mu: 0.0,
    };
    pub const ZF: Self = Self {
        kind: ReceiverKind::Zf,
        mu: 0.0,
    };
    pub const MMSE: Self = Self {
        kind: ReceiverKind::Mmse,
        mu: 0.0,
    };

    pub fn rzf(mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu >= 0.0) {
            return Err(Error::config("mu", format!("must be finite and >= 0, got {mu}")));
        }
        Ok(Self {
            kind: ReceiverKind::Rzf,
            mu,
        })
    }

    /// Short lowercase name used in tables.
    pub fn label(&self) -> &'static str {
        match self.kind {
            ReceiverKind::Mrc => "mrc",
            ReceiverKind::Zf => "zf",
            ReceiverKind::Mmse => "mmse",
            ReceiverKind::Rzf => "rzf",
        }
    }
}

impl fmt::Display for ReceiverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ReceiverKind::Rzf => write!(f, "rzf:{}", self.mu),
            _ => f.write_str(self.label()),
        }
    }
}

impl FromStr for ReceiverSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "mrc" => Ok(Self::MRC),
            "zf" => Ok(Self::ZF),
            "mmse" => Ok(Self::MMSE),
            _ => match s.strip_prefix("rzf:") {
                Some(mu) => {
                    let mu: f64 = mu
                        .parse()
                        .map_err(|_| Error::config("receiver", format!("bad RZF factor in {s:?}")))?;
                    Self::rzf(mu)
                }
                None => Err(Error::config(
                    "receiver",
                    format!("unknown receiver {s:?} (expected mrc, zf, mmse or rzf:<mu>)"),
                )),
            },
        }
    }
}

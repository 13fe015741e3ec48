//! Exact rational evaluation of the closed forms, used as an oracle where
//! floating-point cancellation would swamp the comparison.
//!
//! Every closed-form input is a rational function of the parameters (no
//! square roots appear), so the f64 inputs can be lifted exactly.

#![allow(dead_code)]

use jamrx::model::{DeltaPair, SystemConfig};
use num_rational::BigRational;
use num_traits::ToPrimitive;

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

fn n(x: usize) -> BigRational {
    q(x as f64)
}

/// Denominators `S + J + N` of the ZF and RZF closed forms, written out
/// independently of the library, evaluated exactly.
fn denominators(c: &SystemConfig, d: &DeltaPair, mu: f64) -> (BigRational, BigRational) {
    let (m, tau, s2) = (n(c.m), n(c.tau), q(c.sigma2));
    let (bu, bj, pu, qu, pj, qj) = (q(c.beta_u), q(c.beta_j), q(c.p_u), q(c.q_u), q(c.p_j), q(c.q_j));
    let (d1, d2) = (q(d.delta1()), q(d.delta2()));
    let one = n(1);
    let ej2 = &one / (&pj * &bj + &s2);
    let gj = &tau * &pj * &d2 * &bj + &s2;
    let signal = &tau * &pu * &qu * &bu * &bu;
    let user_noise = &s2 * (&tau * &pu * &bu + &s2);
    let jam_scale = &m * &tau * &pj * &qj * &d1 * &bj * &bj;

    let zf = &signal
        + &jam_scale * &s2 * &s2 / (&gj * &gj)
        + &user_noise
        + &s2 * &tau * &pj * &d1 * &bj * &s2 / &gj;

    let x = q(mu) / &m;
    let inner = &x + &ej2 * &s2;
    let outer = &x + &ej2 * &gj;
    let ratio = &inner / &outer;
    let leak = &tau * &pj * &d1 * &bj * (&tau * &pj * &d2 * &ej2 * &ej2 * &s2 * &bj + &inner * &inner)
        / (&outer * &outer);
    let rzf = &signal + &jam_scale * &ratio * &ratio + &user_noise + &s2 * leak;
    (zf, rzf)
}

/// `Mτp_u q_u β_u² (1/ρ_RZF − 1/ρ_ZF)`, i.e. the denominator difference, exactly.
pub fn exact_gap(c: &SystemConfig, d: &DeltaPair, mu: f64) -> f64 {
    let (zf, rzf) = denominators(c, d, mu);
    (rzf - zf).to_f64().expect("representable")
}

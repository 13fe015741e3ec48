//! Received-signal synthesis for the pilot and data phases.

use rand::Rng;

use crate::cvec::{self, CMatrix};
use crate::error::{Error, Result};
use crate::model::{ChannelRealization, JammerSequence, PilotBook, SystemConfig};
use crate::rng::{complex_normal, fill_complex_normal};
use crate::C64;

/// Stacked pilot-phase receive signal `Y_t` (M × τ).
#[derive(Debug, Clone, PartialEq)]
pub struct PilotObservation {
    pub y_t: CMatrix,
}

/// One data-phase receive vector together with the symbols that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DataObservation {
    pub y_d: Vec<C64>,
    pub x_u: C64,
    pub x_j: C64,
}

fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Dimension {
            context,
            expected,
            actual,
        })
    }
}

fn check_channels(config: &SystemConfig, ch: &ChannelRealization) -> Result<()> {
    check_len("legitimate channel length", config.m, ch.h.len())?;
    check_len("jamming channel length", config.m, ch.g.len())
}

/// M × τ matrix of i.i.d. CN(0, σ²) entries.
pub fn pilot_noise<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R) -> CMatrix {
    let mut n = CMatrix::zeros(config.m, config.tau);
    for c in 0..config.tau {
        fill_complex_normal(rng, config.sigma2, n.col_mut(c));
    }
    n
}

/// `Y_t = √(τp_u) h s_uᵀ + √(τp_j) g s_jᵀ + N_t`, with `N_t` supplied by the
/// caller (`None` gives the noiseless signal).
pub fn pilot_signal(
    config: &SystemConfig,
    pilots: &PilotBook,
    s_j: &JammerSequence,
    ch: &ChannelRealization,
    noise: Option<&CMatrix>,
) -> Result<PilotObservation> {
    let tau = config.tau;
    check_len("pilot codebook size", tau, pilots.tau())?;
    check_len("jamming sequence length", tau, s_j.len())?;
    check_channels(config, ch)?;
    let base = match noise {
        Some(n) => n.clone(),
        None => CMatrix::zeros(config.m, tau),
    };
    add_pilot_terms(config, pilots, s_j, ch, base)
}

fn add_pilot_terms(
    config: &SystemConfig,
    pilots: &PilotBook,
    s_j: &JammerSequence,
    ch: &ChannelRealization,
    mut y_t: CMatrix,
) -> Result<PilotObservation> {
    let tau = config.tau;
    check_len("pilot codebook size", tau, pilots.tau())?;
    check_len("jamming sequence length", tau, s_j.len())?;
    check_channels(config, ch)?;
    check_len("pilot noise rows", config.m, y_t.rows())?;
    check_len("pilot noise columns", tau, y_t.cols())?;
    let tau_f = tau as f64;
    y_t.add_outer((tau_f * config.p_u).sqrt(), &ch.h, pilots.used());
    y_t.add_outer((tau_f * config.p_j).sqrt(), &ch.g, s_j.as_slice());
    Ok(PilotObservation { y_t })
}

/// Pilot phase with freshly drawn noise.
pub fn pilot_phase<R: Rng + ?Sized>(
    config: &SystemConfig,
    pilots: &PilotBook,
    s_j: &JammerSequence,
    ch: &ChannelRealization,
    rng: &mut R,
) -> Result<PilotObservation> {
    let noise = pilot_noise(config, rng);
    add_pilot_terms(config, pilots, s_j, ch, noise)
}

/// `y_d = √q_u h x_u + √q_j g x_j + n_d` for given symbols and noise.
pub fn data_signal(
    config: &SystemConfig,
    ch: &ChannelRealization,
    x_u: C64,
    x_j: C64,
    noise: Option<&[C64]>,
) -> Result<DataObservation> {
    check_channels(config, ch)?;
    let mut y_d = match noise {
        Some(n) => {
            check_len("data noise length", config.m, n.len())?;
            n.to_vec()
        }
        None => vec![C64::new(0.0, 0.0); config.m],
    };
    cvec::axpy(x_u * config.q_u.sqrt(), &ch.h, &mut y_d);
    cvec::axpy(x_j * config.q_j.sqrt(), &ch.g, &mut y_d);
    Ok(DataObservation { y_d, x_u, x_j })
}

/// Data phase with unit-power Gaussian symbols and CN(0, σ²) noise.
pub fn data_phase<R: Rng + ?Sized>(
    config: &SystemConfig,
    ch: &ChannelRealization,
    rng: &mut R,
) -> Result<DataObservation> {
    let x_u = complex_normal(rng, 1.0);
    let x_j = complex_normal(rng, 1.0);
    let mut noise = vec![C64::new(0.0, 0.0); config.m];
    fill_complex_normal(rng, config.sigma2, &mut noise);
    data_signal(config, ch, x_u, x_j, Some(&noise))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, StreamKey};

    fn setup(m: usize) -> (SystemConfig, PilotBook, JammerSequence, ChannelRealization) {
        let cfg = SystemConfig::default().with_m(m).with_user_powers(2.0, 1.5).with_jammer_powers(3.0, 0.5);
        let book = PilotBook::for_config(&cfg).unwrap();
        let mut rng = stream(5, StreamKey::JammerDraw, 0);
        let sj = JammerSequence::sample(cfg.tau, &mut rng).unwrap();
        let ch = ChannelRealization::sample(&cfg, &mut rng);
        (cfg, book, sj, ch)
    }

    #[test]
    fn noiseless_user_only_correlates_to_scaled_channel() {
        let (cfg, book, sj, ch) = setup(12);
        let cfg = cfg.with_jammer_powers(0.0, 0.0);
        let obs = pilot_signal(&cfg, &book, &sj, &ch, None).unwrap();
        let y = obs.y_t.mul_conj(book.used());
        let k = (cfg.tau as f64 * cfg.p_u).sqrt();
        for (a, h) in y.iter().zip(&ch.h) {
            assert!((a - h * k).norm() < 1e-12);
        }
    }

    #[test]
    fn noiseless_jammer_only_projects_onto_unused() {
        let (cfg, book, sj, ch) = setup(12);
        let cfg = cfg.with_user_powers(0.0, 0.0);
        let obs = pilot_signal(&cfg, &book, &sj, &ch, None).unwrap();
        let y = obs.y_t.mul_conj(book.unused());
        let k = (cfg.tau as f64 * cfg.p_j).sqrt() * sj.correlation(book.unused());
        for (a, g) in y.iter().zip(&ch.g) {
            assert!((a - g * k).norm() < 1e-12);
        }
    }

    #[test]
    fn silent_transmitters_leave_noise_with_variance_sigma2() {
        let (cfg, book, sj, ch) = setup(400);
        let cfg = SystemConfig {
            sigma2: 0.3,
            ..cfg.with_all_powers(0.0)
        };
        let mut rng = stream(6, StreamKey::JammerDraw, 1);
        let obs = pilot_phase(&cfg, &book, &sj, &ch, &mut rng).unwrap();
        let n = obs.y_t.as_slice();
        let var = cvec::norm_sqr(n) / n.len() as f64;
        assert!((var - 0.3).abs() < 0.03, "{var}");
    }

    #[test]
    fn noiseless_pilot_matrix_has_rank_at_most_two() {
        let (cfg, book, sj, ch) = setup(6);
        let obs = pilot_signal(&cfg, &book, &sj, &ch, None).unwrap();
        // Every column lies in span{h, g}: residual after projecting onto it vanishes.
        let (h, g) = (&ch.h, &ch.g);
        let hh = cvec::norm_sqr(h);
        let hg = cvec::dotc(h, g);
        let gg = cvec::norm_sqr(g);
        let det = hh * gg - hg.norm_sqr();
        for c in 0..cfg.tau {
            let y = obs.y_t.col(c);
            let bh = cvec::dotc(h, y);
            let bg = cvec::dotc(g, y);
            // Solve the 2×2 Gram system.
            let a = (bh * gg - hg * bg) / det;
            let b = (bg * hh - hg.conj() * bh) / det;
            let resid: f64 = y
                .iter()
                .zip(h.iter().zip(g))
                .map(|(yi, (hi, gi))| (yi - a * hi - b * gi).norm_sqr())
                .sum();
            assert!(resid < 1e-20, "{resid}");
        }
    }

    #[test]
    fn doubling_channel_with_quarter_power_is_identical() {
        let (cfg, book, sj, ch) = setup(10);
        let a = pilot_signal(&cfg.with_jammer_powers(0.0, 0.0), &book, &sj, &ch, None).unwrap();
        let ch2 = ChannelRealization {
            h: cvec::scaled(&ch.h, 2.0),
            g: ch.g.clone(),
        };
        let cfg2 = cfg.with_user_powers(cfg.p_u / 4.0, cfg.q_u).with_jammer_powers(0.0, 0.0);
        let b = pilot_signal(&cfg2, &book, &sj, &ch2, None).unwrap();
        for (x, y) in a.y_t.as_slice().iter().zip(b.y_t.as_slice()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn data_phase_special_cases() {
        let (cfg, _, _, ch) = setup(8);
        let silent = cfg.with_user_powers(1.0, 0.0).with_jammer_powers(1.0, 0.0);
        let noise: Vec<C64> = (0..8).map(|i| C64::new(i as f64, -1.0)).collect();
        let obs = data_signal(&silent, &ch, C64::new(1.0, 0.0), C64::new(1.0, 0.0), Some(&noise)).unwrap();
        assert_eq!(obs.y_d, noise);

        let user = cfg.with_jammer_powers(1.0, 0.0);
        let obs = data_signal(&user, &ch, C64::new(1.0, 0.0), C64::new(0.3, 0.2), None).unwrap();
        for (y, h) in obs.y_d.iter().zip(&ch.h) {
            assert!((y - h * user.q_u.sqrt()).norm() < 1e-12);
        }
    }

    #[test]
    fn data_phase_power_is_sum_of_three_terms() {
        let cfg = SystemConfig::default().with_m(1).with_all_powers(1.0);
        let n = 10_000;
        let mut total = 0.0;
        for i in 0..n {
            let mut rng = stream(77, StreamKey::Trials { draw: 0 }, i);
            let ch = ChannelRealization::sample(&cfg, &mut rng);
            let obs = data_phase(&cfg, &ch, &mut rng).unwrap();
            total += obs.y_d[0].norm_sqr();
        }
        let mean = total / n as f64;
        assert!((mean - 3.0).abs() < 0.15, "{mean}");
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let (cfg, book, sj, ch) = setup(8);
        let wrong = cfg.with_m(9);
        assert!(matches!(
            pilot_signal(&wrong, &book, &sj, &ch, None),
            Err(Error::Dimension { .. })
        ));
        let bad_noise = CMatrix::zeros(8, 2);
        assert!(pilot_signal(&cfg, &book, &sj, &ch, Some(&bad_noise)).is_err());
        assert!(data_signal(&wrong, &ch, C64::new(1.0, 0.0), C64::new(0.0, 0.0), None).is_err());
    }
}

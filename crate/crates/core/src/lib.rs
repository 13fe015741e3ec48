//! Jamming-resistant linear receivers for a single-user massive MIMO uplink.
//!
//! The crate covers the whole chain: pilot and data phase synthesis under a
//! jammer that attacks both phases, estimation of the legitimate and jamming
//! channels (the latter through an unused pilot), MRC / ZF / RZF / MMSE-type
//! receive filters, closed-form large-scale SINR approximations, pilot/data
//! power allocation, and a deterministic Monte Carlo engine that checks the
//! closed forms.
//!
//! Monte Carlo work is data parallel through rayon when the `parallel`
//! feature (on by default) is enabled, and sequential otherwise. Results are
//! bit-identical either way.

pub mod analysis;
pub mod cli;
pub mod cvec;
pub mod error;
pub mod estimate;
pub mod exec;
pub mod model;
pub mod montecarlo;
pub mod powerctl;
pub mod receivers;
pub mod rng;
pub mod simulate;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Converts a power given in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

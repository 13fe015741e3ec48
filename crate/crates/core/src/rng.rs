//! Counter-based random streams.
//!
//! Every random quantity in a run is drawn from a ChaCha8 stream addressed by
//! `(seed, key, index)`. The key selects a purpose (jamming-sequence draws,
//! the trials under one jamming sequence, ...) and the index selects the
//! stream within it, so any schedule of parallel work sees the same numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::C64;

pub type SimRng = ChaCha8Rng;

/// Stream purposes. The discriminants are part of the reproducibility
/// contract; do not renumber.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKey {
    /// Index = jamming-sequence draw number.
    JammerDraw,
    /// Trials under the given jamming-sequence draw; index = trial number.
    Trials { draw: u64 },
    /// δ estimation runs for one antenna count; index = run number.
    DeltaRuns { m: u64 },
}

impl StreamKey {
    fn word(self) -> u64 {
        match self {
            StreamKey::JammerDraw => 0x4a41_4d00,
            StreamKey::Trials { draw } => splitmix64(0x5452_4900 ^ splitmix64(draw)),
            StreamKey::DeltaRuns { m } => splitmix64(0x4445_4c00 ^ splitmix64(m)),
        }
    }
}

#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Opens stream `index` under `(seed, key)`.
pub fn stream(seed: u64, key: StreamKey, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed) ^ key.word());
    rng.set_stream(index);
    rng
}

/// One draw from CN(0, variance).
#[inline]
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

pub fn fill_complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64, out: &mut [C64]) {
    let s = (0.5 * variance).sqrt();
    for x in out.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *x = C64::new(s * re, s * im);
    }
}

pub fn complex_normal_vec<R: Rng + ?Sized>(rng: &mut R, variance: f64, len: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); len];
    fill_complex_normal(rng, variance, &mut v);
    v
}

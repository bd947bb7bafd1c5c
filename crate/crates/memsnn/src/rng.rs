//! Deterministic random-number plumbing.
//!
//! Every stochastic draw in the simulator comes from a ChaCha8 stream that is
//! derived — never shared — from the run seed. A stream is addressed by
//! (domain, presentation, channel): the domain separates training from
//! evaluation, the presentation index separates samples, and the channel
//! index separates input lines within a sample. Identical addresses yield
//! identical streams on every platform, so any run can be replayed bit for
//! bit regardless of worker count or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Domain tag for training-time draws.
pub const DOMAIN_TRAIN: u64 = 0x7472_6169_6e00_0001;
/// Domain tag for evaluation-time draws.
pub const DOMAIN_EVAL: u64 = 0x6576_616c_0000_0001;

/// SplitMix64 mixing step. Bijective on u64, so distinct inputs can never
/// collide before the stream cipher sees them.
pub fn splitmix64(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The stream for one input channel of one presentation.
pub fn channel_rng(seed: u64, domain: u64, presentation: u64, channel: u64) -> ChaCha8Rng {
    let mixed = splitmix64(splitmix64(seed ^ domain).wrapping_add(presentation));
    let mut rng = ChaCha8Rng::seed_from_u64(mixed);
    rng.set_stream(channel);
    rng
}

/// Homogeneous Poisson spike times on `[0, duration)`, strictly increasing.
///
/// Gaps are drawn as `-ln(1 - u) / rate`; a non-positive rate yields an
/// empty train.
pub fn poisson_train(rate: f64, duration: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut times = Vec::new();
    if !(rate > 0.0 && duration > 0.0) {
        return times;
    }
    let mut t = 0.0;
    loop {
        let u: f64 = rng.random();
        t -= (1.0 - u).ln() / rate;
        if t >= duration {
            return times;
        }
        times.push(t);
    }
}

//! Seedable, splittable random streams.
//!
//! Every stochastic routine takes its generator explicitly. Independent
//! consumers (simulation runs, ABC particle slots) get their own ChaCha
//! stream derived from a root seed and a stream id, so results never depend
//! on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Generator for `(seed, stream)`. Distinct stream ids give disjoint sequences.
pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for a two-level index such as `(iteration, slot)`.
pub fn stream_id(major: u32, minor: u32) -> u64 {
    (u64::from(major) << 32) | u64::from(minor)
}

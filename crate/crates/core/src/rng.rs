//! Reproducible random streams.
//!
//! Every stochastic operation takes an explicit generator. Generators are
//! ChaCha8 instances addressed by `(seed, stream)`: the key comes from the
//! seed and the 64-bit stream id selects an independent counter space, so
//! splitting a seed never requires drawing from a parent generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Generator for the given `(seed, stream)` pair.
pub fn stream(seed: u64, stream_id: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Derives an independent child seed; used for per-run seeds of a batch.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer over the (seed, index) pair
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

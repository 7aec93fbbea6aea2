//! Seeded random streams.
//!
//! Every consumer derives its generator from a `(seed, index)` pair so that
//! results do not depend on evaluation order or thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// ChaCha20 keyed by `seed`, on stream `index`.
pub fn stream(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

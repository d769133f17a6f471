//! Per-trial random streams.
//!
//! Every trial owns a ChaCha8 generator seeded from its 64-bit trial seed.
//! Stream 0 drives measurement samples; stream 1 draws random inputs, so the
//! choice of input never shifts the measurement stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn trial_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn input_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

/// Uniform sample in `[0, 1)`.
pub fn unit(rng: &mut impl Rng) -> f64 {
    rng.random::<f64>()
}

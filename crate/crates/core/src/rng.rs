//! Deterministic random streams.
//!
//! Every stochastic routine takes an explicit generator. Parallel trials derive
//! independent ChaCha streams from a base seed and a stream id, so results do
//! not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Packs a (cell, trial) pair into one stream id.
pub fn cell_stream(seed: u64, cell: u32, trial: u32) -> SimRng {
    stream(seed, (u64::from(cell) << 32) | u64::from(trial))
}

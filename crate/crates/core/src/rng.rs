//! Seeded random streams.
//!
//! Every simulation draws from a ChaCha8 stream keyed by `(seed, stream)`.
//! Distinct stream indices give independent sequences for the same seed, so
//! sessions and test phases can be run in any order (or in parallel)
//! without changing each other's draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

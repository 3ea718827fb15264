//! Seed derivation for reproducible parallel work.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for work item `index` under `master`; independent of scheduling.
pub fn stream_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

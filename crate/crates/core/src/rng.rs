//! Reproducible random streams keyed by (seed, replica, step).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Words reserved per step inside one replica's stream.
const WORDS_PER_STEP: u128 = 1 << 32;

/// Independent stream for one replica. Replicas differ in the ChaCha stream id,
/// so no two replicas ever share keystream.
pub fn replica_stream(seed: u64, replica: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Stream positioned at the block reserved for `step` of `replica`. Results do
/// not depend on how replicas or steps are scheduled across threads.
pub fn keyed_stream(seed: u64, replica: u64, step: u64) -> Stream {
    let mut rng = replica_stream(seed, replica);
    rng.set_word_pos(step as u128 * WORDS_PER_STEP);
    rng
}

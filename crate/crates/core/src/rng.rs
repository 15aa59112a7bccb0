//! Seeded, splittable random number streams.
//!
//! All randomized operations in this crate take `&mut Rng`. Replicate `r`
//! of a run with base seed `s` draws from `replicate_rng(s, r)`: the base
//! seed selects the ChaCha key and the replicate index selects the ChaCha
//! stream, so replicates are independent and can be generated in parallel
//! in any order while staying bit-for-bit reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// The RNG used throughout the crate.
pub type Rng = ChaCha12Rng;

/// RNG for the main stream of a run (replicate 0).
pub fn seed_rng(seed: u64) -> Rng {
    replicate_rng(seed, 0)
}

/// Independent stream for replicate `replicate` of a run seeded with `seed`.
pub fn replicate_rng(seed: u64, replicate: u64) -> Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

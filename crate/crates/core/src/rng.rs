//! Seeded random streams.
//!
//! All randomness in the crate flows from a `u64` seed into a ChaCha8
//! generator. Independent sub-streams (per repeat, per trial, per class) are
//! obtained by mixing the parent seed with a tag and an index, never by
//! sharing a generator across tasks, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of sub-stream `index` under `tag`, a pure function of its inputs.
pub fn derive_seed(seed: u64, tag: &str, index: u64) -> u64 {
    let mut h = splitmix64(seed);
    for b in tag.bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    splitmix64(h ^ splitmix64(index))
}

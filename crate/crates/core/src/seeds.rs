//! Seed derivation for independent trials.
//!
//! Trial `i` of a campaign started from `master` uses
//! `splitmix64(master + i * 0x9E37_79B9_7F4A_7C15)` (wrapping arithmetic).
//! Trials can therefore run in any order, on any number of threads, and
//! still draw exactly the same streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stream tag mixed into the seed used by the absorption phase, so the two
/// phases of one attempt never share a stream.
pub const ABSORPTION_STREAM: u64 = 0xA850_4B3E_0000_0002;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(master: u64, trial: u64) -> u64 {
    splitmix64(master.wrapping_add(trial.wrapping_mul(GOLDEN)))
}

pub fn absorption_seed(seed: u64) -> u64 {
    splitmix64(seed ^ ABSORPTION_STREAM)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

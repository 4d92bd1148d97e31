//! Seeding.
//!
//! Every random choice in the crate draws from a [`ChaCha8Rng`]. Independent
//! streams (restarts, ensemble members, generator stages) get their own
//! 64-bit seed derived from a master seed with SplitMix64, so the stream for
//! `(master, tag, index)` does not depend on how many other streams were used.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as Rng;

/// Stream tags. Keeping them in one place avoids accidental reuse.
pub mod tag {
    pub const RESTART: u64 = 0x52;
    pub const INIT: u64 = 0x49;
    pub const ENSEMBLE_GRAPH: u64 = 0x47;
    pub const ENSEMBLE_ORACLE: u64 = 0x4f;
    pub const ENSEMBLE_REPLAY: u64 = 0x4c;
    pub const TRIAL: u64 = 0x54;
    pub const STARTS: u64 = 0x53;
    pub const GEN_STAGE: u64 = 0x58;
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, tag: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ splitmix64(tag)) ^ index)
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

pub fn derived_rng(master: u64, tag: u64, index: u64) -> Rng {
    rng_from_seed(derive_seed(master, tag, index))
}

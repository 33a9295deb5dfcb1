//! Seed derivation. Every random stream is a ChaCha8 generator keyed by a
//! 64-bit seed; replication seeds are derived from the master seed and a
//! path of integers (arm, replication index, stream tag) by SplitMix64
//! mixing, so results never depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags used below a replication seed.
pub mod stream {
    pub const GRAPH: u64 = 1;
    pub const INSTANCE: u64 = 2;
    pub const ASSIGNMENT: u64 = 3;
    pub const CLUSTER_ASSIGNMENT: u64 = 4;
    pub const CLUSTERING: u64 = 5;
}

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Hash `master` together with `path` into a new 64-bit seed.
pub fn derive(master: u64, path: &[u64]) -> u64 {
    let mut h = splitmix64(master);
    for &p in path {
        h = splitmix64(h ^ splitmix64(p.wrapping_add(0x632B_E59B_D9B4_E019)));
    }
    h
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

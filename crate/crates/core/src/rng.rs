//! Seeded random generation.
//!
//! Every stochastic operation in the crate draws from a ChaCha8 stream seeded
//! with [`rand::SeedableRng::seed_from_u64`]. Streams for sub-tasks (per node,
//! per epoch, per sweep cell) are derived from a parent seed with
//! [`derive_seed`], so results never depend on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SpikeRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SpikeRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a parent seed with a stream index (splitmix64 finalizer).
pub fn derive_seed(parent: u64, stream: u64) -> u64 {
    let mut z = parent ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

//! Seedable randomness: ChaCha8 streams with splitmix64 seed derivation.
//!
//! Every randomized component takes an explicit `u64` seed and derives
//! child seeds with [`derive_seed`], so replications run concurrently
//! without shared state and reproduce bit-identically across platforms.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for `seed`.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// splitmix64 finalizer; decorrelates nearby seed values.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for replication `rep` of cell `cell` under `base`, with a
/// `stream` discriminator separating independent uses within one
/// replication (graph generation vs. sampling).
pub fn derive_seed(base: u64, cell: u64, rep: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(cell ^ splitmix64(rep ^ splitmix64(stream))))
}

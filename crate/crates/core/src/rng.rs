//! Seeded random streams.
//!
//! Every simulated run owns one [`SimRng`]. Substream seeds are derived with
//! [`substream_seed`], a SplitMix64 cascade over `(base, cell, run)`; the
//! same triple always yields the same stream on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used for all simulations.
pub type SimRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 output step applied to `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `H(base, cell, run) = sm(sm(sm(base) ^ cell) ^ run)` with `sm` = SplitMix64.
pub fn substream_seed(base: u64, cell: u64, run: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ cell) ^ run)
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

//! Seeded random streams.
//!
//! Every random consumer draws from a [`ChaCha8Rng`] keyed by a 64-bit seed and
//! a stream id. ChaCha is counter based, so distinct `(seed, stream)` pairs give
//! independent sequences and the same pair always replays bit-exactly.
//!
//! Stream ids used in this crate:
//!
//! | stream | consumer                                  |
//! |--------|-------------------------------------------|
//! | 0      | Monte Carlo sweeps, Langevin noise, GP draws |
//! | 1      | random initial lattice configuration      |
//! | 2 + i  | bootstrap resample `i`                    |
//!
//! Replica `i` of a simulation uses the seed `derive_seed(master, i)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_MAIN: u64 = 0;
pub const STREAM_INIT: u64 = 1;
pub const STREAM_RESAMPLE_BASE: u64 = 2;

/// RNG for the given seed and stream.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer applied to `master + index`; used to give each replica
/// or work item its own seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

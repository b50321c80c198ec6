//! Random stream plumbing.
//!
//! Every stochastic operation in this crate draws from an explicitly seeded
//! ChaCha12 stream. ChaCha12 is portable: the byte stream for a given seed is
//! identical on every platform, which is what makes whole-simulation outputs
//! reproducible bit for bit.
//!
//! Experiment cells (sweep value x seed) derive their stream seeds by mixing
//! `(base_seed, value_index, seed_entry)` through SplitMix64, so cells are
//! decorrelated and independent of execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// The one random generator used throughout the crate.
pub type SimRng = ChaCha12Rng;

/// SplitMix64 finalizer. Standard constants from Steele et al.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes an ordered list of 64-bit words into a single stream seed.
pub fn mix_seed(parts: &[u64]) -> u64 {
    let mut acc = 0x243F_6A88_85A3_08D3u64; // pi fractional bits, arbitrary nonzero start
    for &p in parts {
        acc = splitmix64(acc ^ p);
    }
    acc
}

/// Stream for a single run seeded directly from a config seed.
pub fn stream(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Stream for one experiment cell: `(base_seed, sweep value index, seed entry)`.
pub fn cell_stream(base_seed: u64, value_index: u64, seed_entry: u64) -> SimRng {
    stream(mix_seed(&[base_seed, value_index, seed_entry]))
}

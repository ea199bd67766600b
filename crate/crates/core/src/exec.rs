//! Seeding and fan-out helpers shared by the Monte-Carlo and training code.
//!
//! All randomness in the crate flows through [`Rng`], a ChaCha8 stream cipher
//! generator from `rand_chacha`. Its output is specified bit-for-bit and does
//! not depend on platform or word size, so a `u64` seed reproduces the same
//! draws everywhere. Independent streams are obtained by mixing a base seed
//! with a stream index through [`derive_seed`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type Rng = ChaCha8Rng;

/// Creates the crate's generator from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer over `base` and `index`; distinct indices give
/// decorrelated child seeds.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Evaluates `f(0..n)` and returns the results in index order, on the rayon
/// pool unless `single_thread` is set. Output order never depends on
/// completion order.
pub fn map_indexed<T, F>(n: usize, single_thread: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if single_thread {
        (0..n).map(f).collect()
    } else {
        (0..n).into_par_iter().map(f).collect()
    }
}

//! Explicit seeded random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for sub-stream `index` of `master`; stable across platforms and releases.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(0xD1B5_4A32_D192_ED03)))
}

pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `len` iid standard Gaussian draws from the stream for `seed`.
pub fn gaussian_vec(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = stream(seed);
    (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
}

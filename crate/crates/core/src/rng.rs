//! Counter-based random streams.
//!
//! A stream is a ChaCha8 generator keyed by the master seed and a path of
//! indices (depth, sequence, shot, ...). Two streams with different paths are
//! statistically independent, and a stream never depends on which other
//! streams were consumed before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Folds an index path into a child seed.
pub fn derive(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(seed), |acc, &i| {
        splitmix64(acc ^ splitmix64(i.wrapping_add(0x5851_F42D_4C95_7F2D)))
    })
}

/// Random stream for `(seed, path)`.
pub fn stream(seed: u64, path: &[u64]) -> Rng {
    let key = derive(seed, path);
    let mut bytes = [0u8; 32];
    for (i, chunk) in bytes.chunks_mut(8).enumerate() {
        chunk.copy_from_slice(&splitmix64(key.wrapping_add(i as u64)).to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}

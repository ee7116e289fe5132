//! Seeded random streams.
//!
//! Every stream is ChaCha8 keyed with 32 bytes taken from four consecutive
//! SplitMix64 outputs (little-endian) of the stream seed. Uniform floats use
//! the top 53 bits of `next_u64`: `(x >> 11) * 2^-53`, so they lie in
//! `[0, 1)`. Per-item seeds are `splitmix64(seed ^ fnv1a64(item_id))`, which
//! makes every item's stream independent of processing order.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 step applied to `state`; returns the mixed output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a hash.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Seed for the stream belonging to `item_id` under a global `seed`.
pub fn derive_seed(seed: u64, item_id: &str) -> u64 {
    let mut state = seed ^ fnv1a64(item_id.as_bytes());
    splitmix64(&mut state)
}

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        let mut state = seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Self { inner: ChaCha8Rng::from_seed(key) }
    }

    pub fn for_item(seed: u64, item_id: &str) -> Self {
        Self::new(derive_seed(seed, item_id))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

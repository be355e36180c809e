//! Seedable, splittable random streams.
//!
//! Every stochastic operation in the crate takes an explicit [`RngStream`].
//! Child streams are derived from the parent key and a child index only, so a
//! sweep that hands stream `split(i)` to task `i` produces the same numbers
//! regardless of scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

#[derive(Clone, Debug)]
pub struct RngStream {
    key: u64,
    inner: ChaCha12Rng,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        let key = splitmix64(seed);
        RngStream {
            key,
            inner: ChaCha12Rng::seed_from_u64(key),
        }
    }

    /// Independent child stream. Does not advance `self`.
    pub fn split(&self, index: u64) -> Self {
        let key = splitmix64(self.key ^ splitmix64(index.wrapping_add(0xA5A5_5A5A_0F0F_F0F0)));
        RngStream {
            key,
            inner: ChaCha12Rng::seed_from_u64(key),
        }
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        // 53 random mantissa bits.
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

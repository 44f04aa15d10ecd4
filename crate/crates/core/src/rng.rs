//! Seeded random streams.
//!
//! Every stochastic operation takes a [`SeedStream`] explicitly. Independent
//! streams for parallel replications are derived from a run seed with
//! [`derive_seed`] or [`SeedStream::substream`], never by sharing a generator.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A reproducible random stream: ChaCha8 keyed by a seed and a stream number.
#[derive(Debug, Clone)]
pub struct SeedStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    /// A fresh stream keyed by the same seed, independent of `self`.
    pub fn substream(&self, id: u64) -> Self {
        Self::with_stream(self.seed, derive_seed(self.stream, id))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw on (0, 1].
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    /// Uniform integer on [0, n). `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        // Lemire's multiply-shift with rejection.
        let n64 = n as u64;
        let threshold = n64.wrapping_neg() % n64;
        loop {
            let m = (self.rng.next_u64() as u128) * (n64 as u128);
            if m as u64 >= threshold {
                return (m >> 64) as usize;
            }
        }
    }
}

impl RngCore for SeedStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// SplitMix64 mix of a base seed and an index; used to key replications.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

//! Deterministic randomness shared by every sampling step.
//!
//! The generator is ChaCha20 keyed from a 64-bit seed. Independent streams
//! for parallel work come from the same seed with a different ChaCha stream
//! id, so `(seed, stream)` pins the whole output sequence on any platform.

use rand::{Error as RandError, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Identifier written into sketch files next to the seed material.
pub const RNG_ALGO_ID: &str = "chacha20";

#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    inner: ChaCha20Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    /// A fresh generator on another stream of the same seed.
    pub fn derive(&self, stream: u64) -> Self {
        Self::with_stream(self.seed, stream)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn algo_id(&self) -> &'static str {
        RNG_ALGO_ID
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), RandError> {
        self.inner.try_fill_bytes(dest)
    }
}

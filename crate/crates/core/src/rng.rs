//! Seeded, splittable random streams.
//!
//! A [`RngStream`] is a ChaCha8 generator keyed by a master seed and a stream
//! index. Streams with the same seed and different indices are independent,
//! which is what the parallel estimators use to assign one stream per chunk
//! of samples regardless of how many workers run the chunks.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent substream `index` of this stream's master seed.
    ///
    /// Depends only on `(seed, index)`, never on how much of `self` has been
    /// consumed.
    pub fn substream(&self, index: u64) -> Self {
        Self::with_stream(self.seed, index.wrapping_add(1))
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

//! Reproducible random substreams keyed by `(seed, stream, draw)`.
//!
//! Backed by ChaCha8, whose state is a pure function of the key, the
//! stream id and the word position. A Monte Carlo block opens stream
//! `block_index`, so blocks can be simulated in any order or on any
//! worker and still see the same numbers.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone)]
pub struct Substream {
    rng: ChaCha8Rng,
}

impl Substream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// The substream positioned just before its `draw`-th 64-bit output.
    pub fn at(seed: u64, stream: u64, draw: u64) -> Self {
        let mut s = Self::new(seed, stream);
        s.rng.set_word_pos(u128::from(draw) * 2);
        s
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

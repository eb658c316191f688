//! Deterministic random streams for parallel Monte-Carlo paths.
//!
//! Every path owns its generators exclusively. A stream is derived from the
//! master seed plus a list of context words (grid cell, path index, agent
//! slot), so results are independent of how paths are scheduled across
//! threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Slot reserved for environment draws (state transitions, payoff shocks).
pub const ENV_SLOT: u64 = 0xE17F;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A seeded ChaCha stream tied to one (master_seed, context) pair.
///
/// Identical seed and context yield identical draw sequences; distinct
/// contexts yield statistically independent streams.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    path_index: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    /// Stream for a bare (seed, path) pair.
    pub fn new(master_seed: u64, path_index: u64) -> Self {
        Self::with_context(master_seed, &[path_index])
    }

    /// Stream derived from the master seed and arbitrary context words.
    ///
    /// The words are folded into a splitmix chain that expands into the full
    /// 256-bit ChaCha key, so nearby contexts do not produce nearby streams.
    pub fn with_context(master_seed: u64, context: &[u64]) -> Self {
        let mut state = master_seed ^ 0x51A5_1057_2EA3_0C75;
        let mut acc = splitmix64(&mut state);
        for &word in context {
            state ^= word;
            acc ^= splitmix64(&mut state);
        }
        let mut seed = [0u8; 32];
        let mut key_state = acc;
        for chunk in seed.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut key_state).to_le_bytes());
        }
        Self {
            master_seed,
            path_index: context.first().copied().unwrap_or(0),
            inner: ChaCha8Rng::from_seed(seed),
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn path_index(&self) -> u64 {
        self.path_index
    }

    /// Uniform draw on [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform index in 0..n.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.gen_range(0..n)
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

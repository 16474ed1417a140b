//! Deterministic random-number streams.
//!
//! A run owns one [`RngSeed`]. Every consumer of randomness inside the run
//! (initialization, variation, survival selection, the stage gate, Monte
//! Carlo integration) draws from its own ChaCha stream keyed by the seed and
//! selected by a [`Purpose`]. Adding draws to one purpose never shifts the
//! values seen by another, and independent runs never share state, so runs
//! can be scheduled in any order or in parallel without changing results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random generator handed to every stochastic operation.
pub type StreamRng = ChaCha8Rng;

/// What a stream is used for. The discriminant is the ChaCha stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Initialization = 1,
    Variation = 2,
    Selection = 3,
    Gate = 4,
    MonteCarlo = 5,
}

/// Seed of one run (or of a whole experiment, via [`RngSeed::for_run`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed {
    master: u64,
}

impl RngSeed {
    pub const fn new(master: u64) -> Self {
        Self { master }
    }

    pub const fn value(&self) -> u64 {
        self.master
    }

    /// Seed of the `index`-th run derived from this master seed.
    pub fn for_run(&self, index: u64) -> RngSeed {
        let mut state = self.master ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93);
        RngSeed::new(splitmix64(&mut state))
    }

    /// Independent generator for `purpose`.
    pub fn stream(&self, purpose: Purpose) -> StreamRng {
        let mut state = self.master;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(purpose as u64);
        rng
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

//! Deterministic RNG stream derivation.
//!
//! Every random quantity in this crate is drawn from a [`StreamKey`] derived
//! from a master [`Seed`] by pure hashing, never from shared RNG state:
//!
//! ```text
//! trial stream  = mix(master, trial_index)
//! type stream   = mix(trial stream, type_index)
//! ```
//!
//! `mix` is the SplitMix64 finalizer applied to the parent key xored with the
//! golden-ratio multiple of the child index. Because a stream's value depends
//! only on the derivation path, generation order and thread count never
//! affect output: the same `(master, trial, type)` always yields the same
//! bits. The base generator is ChaCha8.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The pseudorandom generator backing all sampling.
pub type SimRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer over a (parent, index) pair.
fn mix(parent: u64, index: u64) -> u64 {
    let mut z = parent ^ index.wrapping_mul(GOLDEN).wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Master seed for a whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Seed {
    master: u64,
}

impl Seed {
    pub fn new(master: u64) -> Self {
        Seed { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// Stream for one Monte Carlo trial.
    pub fn trial_stream(&self, trial: u64) -> StreamKey {
        StreamKey(mix(self.master, trial))
    }

    /// Stream for direct single-shot use (e.g. one generator call).
    pub fn stream(&self) -> StreamKey {
        StreamKey(self.master)
    }
}

impl From<u64> for Seed {
    fn from(master: u64) -> Self {
        Seed::new(master)
    }
}

/// A derivable point in the stream tree. Copyable and thread-safe; turn it
/// into an RNG with [`StreamKey::rng`] or derive children with
/// [`StreamKey::child`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey(u64);

impl StreamKey {
    /// Derive the child stream for `index` (per-type, per-row, ...).
    pub fn child(&self, index: u64) -> StreamKey {
        StreamKey(mix(self.0, index))
    }

    /// Instantiate the generator for this stream.
    pub fn rng(&self) -> SimRng {
        SimRng::seed_from_u64(self.0)
    }

    pub fn key(&self) -> u64 {
        self.0
    }
}

//! Seed derivation and labeled random streams.
//!
//! Every stochastic choice in the crate draws from a [`ChaCha8Rng`] whose key
//! is expanded from a 64-bit seed with SplitMix64 and whose stream id is a
//! fixed label. ChaCha output is specified independently of platform and word
//! size, so identical seeds replay identically everywhere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The pinned generator used throughout the crate.
pub type Stream = ChaCha8Rng;

/// Stream labels. Values are part of the reproducibility contract; do not renumber.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamLabel {
    Init = 1,
    Participation = 2,
    Tie = 3,
    Mutation = 4,
    Graph = 5,
}

/// One step of SplitMix64: advances `state` and returns the mixed output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a sequence of words into one 64-bit value.
pub fn mix_words(words: &[u64]) -> u64 {
    let mut state = 0x6A09_E667_F3BC_C908;
    let mut acc = 0u64;
    for &w in words {
        state ^= w;
        acc = acc.rotate_left(17) ^ splitmix64(&mut state);
    }
    acc
}

/// Build the stream identified by `label` under `seed`.
pub fn stream(seed: u64, label: StreamLabel) -> Stream {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(label as u64);
    rng
}

//! Deterministic RNG stream derivation.
//!
//! Every source of randomness in the crate is a ChaCha8 stream derived from
//! a user-supplied root seed plus a tag path identifying the consumer (class,
//! tree, node, trial, ...). Streams are independent of each other and of the
//! order in which work is scheduled, so parallel training cannot change
//! results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags for the crate's fixed RNG consumers.
pub const STREAM_TREE: u64 = 1;
pub const STREAM_NODE: u64 = 2;
pub const STREAM_SWEEP_TRIAL: u64 = 3;
pub const STREAM_SYNTH_SIGNATURES: u64 = 4;
pub const STREAM_CV_FOLDS: u64 = 5;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a root seed and a tag path into a single derived seed.
pub fn derive_seed(root: u64, tags: &[u64]) -> u64 {
    let mut state = root ^ 0x51ed_2701_89cb_a11d;
    let mut out = splitmix64(&mut state);
    for &t in tags {
        state ^= t;
        out ^= splitmix64(&mut state);
    }
    out
}

/// Builds the ChaCha8 stream for `(root, tags)`.
pub fn derive_rng(root: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut state = derive_seed(root, tags);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

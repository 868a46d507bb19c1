//! Seed derivation.
//!
//! Every random stream in the toolkit is derived from a single master seed by
//! mixing it with a small tuple of integers (stream tag, class code, config
//! index, attempt index). The mixer is SplitMix64's finalizer, which is fixed
//! and platform independent, so sub-seeds are stable across runs, worker
//! counts and releases.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// Stream tags keep config sampling and simulation attempts on disjoint seeds.
pub mod stream {
    pub const CONFIG: u64 = 0x636f_6e66;
    pub const ATTEMPT: u64 = 0x6174_7470;
    pub const SPLIT: u64 = 0x7370_6c74;
    pub const FOLDS: u64 = 0x666f_6c64;
    pub const PERMUTE: u64 = 0x7065_726d;
    pub const SUBSAMPLE: u64 = 0x7375_6273;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable 64-bit hash of a master seed and a tuple of indices.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn rng_from(master: u64, parts: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master, parts))
}

/// Sub-seed of one simulation attempt.
pub fn attempt_seed(master: u64, class_code: u8, config_index: u64, attempt: u32) -> u64 {
    derive_seed(
        master,
        &[stream::ATTEMPT, class_code as u64, config_index, attempt as u64],
    )
}

/// Seed of the parameter draw for one configuration.
pub fn config_seed(master: u64, class_code: u8, config_index: u64) -> u64 {
    derive_seed(master, &[stream::CONFIG, class_code as u64, config_index])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable_and_distinct() {
        let a = attempt_seed(42, 3, 7, 0);
        assert_eq!(a, attempt_seed(42, 3, 7, 0));
        assert_ne!(a, attempt_seed(42, 3, 7, 1));
        assert_ne!(a, attempt_seed(42, 4, 7, 0));
        assert_ne!(a, config_seed(42, 3, 7));
        // frozen value: guards against accidental changes to the mixer
        assert_eq!(derive_seed(0, &[]), splitmix64(0));
    }
}

//! Seed derivation and the deterministic RNG used everywhere.
//!
//! Every sequence gets its own independent stream derived from the master
//! seed, so sequences can be generated in any order (or in parallel) with
//! byte-identical output.

use rand_chacha::rand_core::SeedableRng;

/// The stream cipher RNG used throughout; fixed so output is reproducible
/// across platforms and releases.
pub type StreamRng = rand_chacha::ChaCha8Rng;

/// SplitMix64 mixing step.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed for one sequence from the master seed.
///
/// The derivation is `splitmix64(splitmix64(master ^ background_id) ^ seq_idx)`,
/// so every (background, sequence) pair maps to an independent stream and any
/// change to the master seed changes every sequence seed.
pub fn derive_sequence_seed(master_seed: u64, background_id: u32, seq_idx: u32) -> u64 {
    splitmix64(splitmix64(master_seed ^ u64::from(background_id)) ^ u64::from(seq_idx))
}

/// Derive a named sub-stream from a sequence seed (background rendering,
/// scenario sampling, per-frame motion, detector noise...).
pub fn derive_substream(seed: u64, label: u64) -> u64 {
    splitmix64(seed ^ splitmix64(label))
}

pub fn rng_from_seed(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_seeds_change_with_master() {
        let a: Vec<u64> = (1..=14)
            .flat_map(|bg| (1..=10).map(move |s| derive_sequence_seed(7, bg, s)))
            .collect();
        let b: Vec<u64> = (1..=14)
            .flat_map(|bg| (1..=10).map(move |s| derive_sequence_seed(8, bg, s)))
            .collect();
        for (x, y) in a.iter().zip(&b) {
            assert_ne!(x, y);
        }
    }

    #[test]
    fn sequence_seeds_distinct() {
        let mut seen = std::collections::HashSet::new();
        for bg in 1..=14 {
            for s in 1..=10 {
                assert!(seen.insert(derive_sequence_seed(42, bg, s)));
            }
        }
    }

    #[test]
    fn splitmix_known_values() {
        // Reference values from the published SplitMix64 test vector (seed 1234567).
        let mut state = 1234567u64;
        let mut out = Vec::new();
        for _ in 0..3 {
            state = state.wrapping_add(0);
            out.push(splitmix64(state));
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        }
        assert_eq!(out[0], 6457827717110365317);
        assert_eq!(out[1], 3203168211198807973);
        assert_eq!(out[2], 9817491932198370423);
    }
}

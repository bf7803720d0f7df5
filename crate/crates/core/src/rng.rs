//! Seed streams and the stable type hash.
//!
//! Every random draw in the crate comes from a ChaCha8 generator seeded with
//! `seed ^ shard`. Independent purposes (word generation, per-token filtering,
//! lexicon synthesis) use distinct ChaCha stream ids of that same key, so
//! enabling a filter never shifts the sequence of generated words.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

const GENERATION_STREAM: u64 = 0;
const FILTER_STREAM: u64 = 1;
const LEXICON_STREAM: u64 = 2;

fn stream(seed: u64, shard: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ shard);
    rng.set_stream(stream);
    rng
}

/// Word-generation stream for one corpus shard.
pub fn generation_rng(seed: u64, shard: u64) -> SimRng {
    stream(seed, shard, GENERATION_STREAM)
}

/// Per-token survival draws for one corpus shard.
pub fn filter_rng(seed: u64, shard: u64) -> SimRng {
    stream(seed, shard, FILTER_STREAM)
}

/// Stream used by synthetic lexicon construction.
pub fn lexicon_rng(seed: u64) -> SimRng {
    stream(seed, 0, LEXICON_STREAM)
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a 64 over `seed` (little-endian) followed by `surface`, passed through
/// the SplitMix64 finalizer. Stable across platforms and releases.
pub fn type_hash(seed: u64, surface: &str) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in seed.to_le_bytes().iter().chain(surface.as_bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    splitmix64(h)
}

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform variate in [0, 1) determined by `(seed, surface)`.
pub fn type_uniform(seed: u64, surface: &str) -> f64 {
    (type_hash(seed, surface) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn fnv_constants_match_reference() {
        // FNV-1a 64 of the empty string is the offset basis; of "a" is the published vector.
        let mut h = FNV_OFFSET;
        for &b in b"a" {
            h ^= u64::from(b);
            h = h.wrapping_mul(FNV_PRIME);
        }
        assert_eq!(h, 0xaf63_dc4c_8601_ec8c);
    }

    #[test]
    fn type_hash_is_pinned() {
        // Frozen so that per-type survival decisions never silently change.
        assert_eq!(type_hash(0, ""), splitmix64(0xa8c7_f832_281a_39c5));
        assert_eq!(type_hash(42, "act"), type_hash(42, "act"));
        assert_ne!(type_hash(42, "act"), type_hash(43, "act"));
    }

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let a: u64 = generation_rng(7, 0).random();
        let b: u64 = filter_rng(7, 0).random();
        let c: u64 = generation_rng(7, 1).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, generation_rng(7, 0).random::<u64>());
    }

    #[test]
    fn type_uniform_in_unit_interval() {
        for i in 0..1000 {
            let u = type_uniform(i, "w");
            assert!((0.0..1.0).contains(&u));
        }
    }
}

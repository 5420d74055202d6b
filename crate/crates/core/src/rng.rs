//! Seed derivation for reproducible, independent random streams.
//!
//! Every stream is a ChaCha8 generator seeded from a 64-bit value obtained by
//! folding a master seed with an arbitrary path of stream coordinates
//! (algorithm index, repetition, substream, ...) through SplitMix64.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Substream used by environments for reward noise.
pub const ENV_STREAM: u64 = 0x454e_5649;
/// Substream used by policies for tie-breaking.
pub const POLICY_STREAM: u64 = 0x504f_4c49;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and a path of coordinates.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &p| {
        splitmix64(acc ^ splitmix64(p))
    })
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derived_seeds_differ_by_path() {
        let m = 42;
        let a = derive_seed(m, &[0, 1]);
        let b = derive_seed(m, &[1, 0]);
        let c = derive_seed(m, &[0, 1, ENV_STREAM]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(m, &[0, 1]));
    }

    #[test]
    fn streams_replay() {
        let s = derive_seed(7, &[3]);
        let x: Vec<u64> = seeded_rng(s)
            .sample_iter(rand::distributions::Standard)
            .take(8)
            .collect();
        let y: Vec<u64> = seeded_rng(s)
            .sample_iter(rand::distributions::Standard)
            .take(8)
            .collect();
        assert_eq!(x, y);
    }
}

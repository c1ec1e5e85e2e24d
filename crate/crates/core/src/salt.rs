//! Per-filter tables of multiplicative hash salts.
//!
//! Every filter derives all of its probe positions from one base hash of the
//! key by multiplying it with per-purpose odd constants ("salts") and taking
//! high bits of the product. The salts are generated deterministically from
//! the filter seed so that a serialized filter can be rebuilt exactly, and
//! they are forced odd because an even multiplier would throw away low-order
//! information of the hash (multiplication by an even number is not a
//! bijection mod 2^64).

use alloc::vec::Vec;

use crate::mix::SplitMix64;

/// The salt table of one filter configuration.
///
/// Layout: `k` bit salts first, then the block-selection salt, then one
/// word-selection salt per word of a block (used by the cache-sectorized
/// variant's group selection; allocated uniformly so the table depends only
/// on `(seed, k, words_per_block)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaltTable {
    salts: Vec<u64>,
    k: u32,
}

impl SaltTable {
    /// Generates the table for a filter with `k` probe bits and
    /// `words_per_block` words in each block.
    ///
    /// Candidates are drawn from a SplitMix64 stream seeded with the filter
    /// seed, forced odd, and de-duplicated by retry, so every salt is unique
    /// within the table and the table is a pure function of its arguments.
    #[must_use]
    pub fn generate(seed: u64, k: u32, words_per_block: u32) -> Self {
        let count = (k + 1 + words_per_block) as usize;
        let mut rng = SplitMix64::new(seed);
        let mut salts = Vec::with_capacity(count);
        while salts.len() < count {
            let candidate = rng.next_u64() | 1;
            if !salts.contains(&candidate) {
                salts.push(candidate);
            }
        }
        Self { salts, k }
    }

    /// Salt for probe bit `i` (`i < k`).
    #[inline]
    #[must_use]
    pub fn bit_salt(&self, i: u32) -> u64 {
        self.salts[i as usize]
    }

    /// Salt used to derive the block index.
    #[inline]
    #[must_use]
    pub fn block_salt(&self) -> u64 {
        self.salts[self.k as usize]
    }

    /// Salt used to select the word within group `g`.
    #[inline]
    #[must_use]
    pub fn group_salt(&self, g: u32) -> u64 {
        self.salts[(self.k + 1 + g) as usize]
    }

    /// All salts, bit salts first, then block salt, then group salts.
    #[must_use]
    pub fn as_slice(&self) -> &[u64] {
        &self.salts
    }
}

//! Derivation of a key's probe pattern from its base hash.
//!
//! A key is hashed exactly once ([`crate::hash::xxh64_u64`]); everything else
//! is multiplicative remixing of that one value `h`:
//!
//! * a *draw* from a power-of-two range `[0, 2^w)` is the top `w` bits of
//!   `h · salt` (wrapping multiply by a per-purpose odd salt) — the top bits
//!   of a multiplicative product are its best-mixed bits;
//! * the *block index* maps `h · block_salt` onto the non-power-of-two block
//!   count by the multiply-high range reduction, which avoids both a modulo
//!   and its bias.
//!
//! The variant rules then place `k` such draws into words: anywhere in the
//! array (classical), anywhere in one block (blocked / register-blocked),
//! exactly `k/s` per word (sectorized), or `k/z` into one selected word per
//! word group (cache-sectorized).

use alloc::vec::Vec;

use crate::config::{FilterConfig, Geometry, Variant};
use crate::salt::SaltTable;
use crate::storage::FilterWord;

/// Maps a uniform 64-bit value onto `[0, n)` by taking the high word of the
/// 128-bit product — an unbiased-to-within-rounding, division-free range
/// reduction.
#[inline]
#[must_use]
pub fn fastrange(x: u64, n: u64) -> u64 {
    ((u128::from(x) * u128::from(n)) >> 64) as u64
}

/// The top `width` bits of `x` (`width <= 63`), i.e. a draw from
/// `[0, 2^width)`. A zero width yields 0, so degenerate selections (one word
/// per group) cost no branch at the call sites that can prove width > 0 and
/// stay correct at the ones that cannot.
#[inline]
#[must_use]
pub fn top_bits(x: u64, width: u32) -> u64 {
    debug_assert!(width < 64);
    // Split the shift so that width == 0 never produces a shift by 64.
    (x >> 1) >> (63 - width)
}

/// Block index of a key with base hash `h`.
#[inline]
#[must_use]
pub fn block_index(h: u64, block_salt: u64, blocks: u64) -> u64 {
    fastrange(h.wrapping_mul(block_salt), blocks)
}

/// Global bit position of probe `i` for a classical filter.
#[inline]
#[must_use]
pub fn global_position(h: u64, bit_salt: u64, m_effective: u64) -> u64 {
    fastrange(h.wrapping_mul(bit_salt), m_effective)
}

/// In-word bit draw: top `log2(S)` bits of `h · salt`.
#[inline]
fn word_bit<W: FilterWord>(h: u64, salt: u64) -> W {
    W::bit(top_bits(h.wrapping_mul(salt), W::BITS_LOG2) as u32)
}

/// Fills `masks` (one per word of the block, all cleared first) with the
/// probe bits of a key with base hash `h`, for any blocked variant.
///
/// `masks.len()` must equal the configuration's words per block.
pub(crate) fn fill_block_masks<W: FilterWord>(
    h: u64,
    variant: Variant,
    k: u32,
    groups: u32,
    salts: &SaltTable,
    masks: &mut [W],
) {
    masks.fill(W::ZERO);
    let s = masks.len() as u32;
    match variant {
        Variant::Classical => unreachable!("classical filters have no block mask"),
        Variant::Blocked | Variant::RegisterBlocked => {
            // Draw from the whole block: top log2(B) bits select both the
            // word and the bit within it. Words may receive unequal shares.
            let block_width = W::BITS_LOG2 + s.trailing_zeros();
            for i in 0..k {
                let pos = top_bits(h.wrapping_mul(salts.bit_salt(i)), block_width);
                let word = (pos >> W::BITS_LOG2) as usize;
                masks[word] = masks[word].or(W::bit((pos as u32) & (W::BITS - 1)));
            }
        }
        Variant::Sectorized => {
            // Word w receives draws from salts w·(k/s) .. (w+1)·(k/s).
            let per_word = k / s;
            let mut i = 0;
            for mask in masks.iter_mut() {
                for _ in 0..per_word {
                    *mask = mask.or(word_bit::<W>(h, salts.bit_salt(i)));
                    i += 1;
                }
            }
        }
        Variant::CacheSectorized => {
            // Group g spans words g·(s/z) .. (g+1)·(s/z); one word of the
            // span is selected per key and receives the group's k/z draws.
            let span = s / groups;
            let sel_width = span.trailing_zeros();
            let per_group = k / groups;
            for g in 0..groups {
                let sel = top_bits(h.wrapping_mul(salts.group_salt(g)), sel_width) as u32;
                let word = (g * span + sel) as usize;
                let mut mask = masks[word];
                for j in 0..per_group {
                    mask = mask.or(word_bit::<W>(h, salts.bit_salt(g * per_group + j)));
                }
                masks[word] = mask;
            }
        }
    }
}

/// The fully materialised probe pattern of one key, as placed by the variant
/// rules. This is the reference representation used by the scalar oracle and
/// by tests; the bulk engine consumes the same masks without materialising
/// the struct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KeyPattern<W: FilterWord> {
    /// Classical: `k` absolute bit positions in `[0, m_effective)`.
    Global {
        /// The probe positions (duplicates possible, as drawn).
        positions: Vec<u64>,
    },
    /// Any blocked variant: per-word masks within one block.
    Blocked {
        /// Index of the block the key falls into.
        block: u64,
        /// One mask per word of the block (zero where no probe bit landed).
        masks: Vec<W>,
        /// For cache-sectorized filters, the word selected within each group
        /// (index relative to the group's first word); `None` otherwise.
        selected: Option<Vec<u32>>,
    },
}

/// Builds the probe pattern of base hash `h` under `config`.
#[must_use]
pub fn make_pattern<W: FilterWord>(
    h: u64,
    config: &FilterConfig,
    geometry: &Geometry,
    salts: &SaltTable,
) -> KeyPattern<W> {
    debug_assert_eq!(W::BITS, config.word_bits);
    match config.variant {
        Variant::Classical => {
            let positions = (0..config.k)
                .map(|i| global_position(h, salts.bit_salt(i), geometry.m_effective))
                .collect();
            KeyPattern::Global { positions }
        }
        variant => {
            let mut masks = alloc::vec![W::ZERO; geometry.words_per_block as usize];
            fill_block_masks(h, variant, config.k, config.groups, salts, &mut masks);
            let selected = (variant == Variant::CacheSectorized).then(|| {
                let span = geometry.words_per_block / config.groups;
                let sel_width = span.trailing_zeros();
                (0..config.groups)
                    .map(|g| top_bits(h.wrapping_mul(salts.group_salt(g)), sel_width) as u32)
                    .collect()
            });
            KeyPattern::Blocked {
                block: block_index(h, salts.block_salt(), geometry.blocks),
                masks,
                selected,
            }
        }
    }
}

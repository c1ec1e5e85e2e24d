//! Filter variants, configuration, and derived geometry.

use core::fmt;

use crate::layout::{Layout, LayoutError};

/// The five filter organisations.
///
/// All of them share the same storage engine, hashing scheme, and bulk
/// execution machinery; they differ only in how a key's `k` probe bits are
/// distributed over the bit array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Classical: `k` independent positions spread over the whole array.
    Classical,
    /// Blocked: all `k` bits fall into one `B`-bit block, positioned freely
    /// within it (words inside the block may receive unequal shares).
    Blocked,
    /// Register-blocked: a blocked filter whose block is a single word
    /// (`B = S`).
    RegisterBlocked,
    /// Sectorized: the block's words each receive exactly `k / s` bits.
    Sectorized,
    /// Cache-sectorized: the block's words are split into `z` groups; each
    /// group selects one word to receive its `k / z` bits, so lookups touch
    /// only `z` of the `s` words.
    CacheSectorized,
}

impl Variant {
    /// All variants, in wire-code order.
    pub const ALL: [Variant; 5] = [
        Variant::Classical,
        Variant::Blocked,
        Variant::RegisterBlocked,
        Variant::Sectorized,
        Variant::CacheSectorized,
    ];

    /// Stable single-byte code used in the serialized header.
    #[must_use]
    pub fn code(self) -> u8 {
        match self {
            Variant::Classical => 0,
            Variant::Blocked => 1,
            Variant::RegisterBlocked => 2,
            Variant::Sectorized => 3,
            Variant::CacheSectorized => 4,
        }
    }

    /// Inverse of [`Variant::code`].
    #[must_use]
    pub fn from_code(code: u8) -> Option<Variant> {
        Variant::ALL.get(code as usize).copied()
    }

    /// Short lowercase name used by the CLI and report rows.
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Variant::Classical => "cbf",
            Variant::Blocked => "bbf",
            Variant::RegisterBlocked => "rbbf",
            Variant::Sectorized => "sbf",
            Variant::CacheSectorized => "csbf",
        }
    }

    /// Inverse of [`Variant::name`] (case-insensitive).
    #[must_use]
    pub fn from_name(name: &str) -> Option<Variant> {
        let mut buf = [0u8; 8];
        let len = name.len();
        if len > buf.len() {
            return None;
        }
        buf[..len].copy_from_slice(name.as_bytes());
        buf[..len].make_ascii_lowercase();
        Variant::ALL
            .into_iter()
            .find(|v| v.name().as_bytes() == &buf[..len])
    }

    /// Whether probe bits are confined to one block (everything but
    /// [`Variant::Classical`]).
    #[must_use]
    pub fn is_blocked(self) -> bool {
        !matches!(self, Variant::Classical)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Complete description of a filter instance.
///
/// `m_bits` is the *requested* size; storage is rounded up to whole blocks
/// (see [`Geometry::m_effective`]). `layout` drives this instance's bulk
/// operations and is deliberately excluded from serialization and equality of
/// filter contents: it changes the execution schedule, never the bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FilterConfig {
    /// Filter organisation.
    pub variant: Variant,
    /// Requested size of the bit array.
    pub m_bits: u64,
    /// Block size in bits; a power of two, at least `word_bits`. For the
    /// classical variant this only sets the storage rounding granule.
    pub block_bits: u64,
    /// Machine word size in bits: 32 or 64.
    pub word_bits: u32,
    /// Probe bits per key.
    pub k: u32,
    /// Word groups per block; cache-sectorized only, 0 otherwise.
    pub groups: u32,
    /// Seed for the base hash and the salt table.
    pub seed: u64,
    /// Execution layout for bulk operations.
    pub layout: Layout,
}

/// Geometry derived from a valid [`FilterConfig`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Geometry {
    /// Number of blocks `b = ceil(m / B)`.
    pub blocks: u64,
    /// Words per block `s = B / S`.
    pub words_per_block: u32,
    /// Actual bit capacity `b · B`; all analytic formulas use this.
    pub m_effective: u64,
    /// Total words of backing storage, `b · s`.
    pub total_words: u64,
}

/// A configuration constraint violation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConfigError {
    /// `m_bits` must be at least 1.
    ZeroSize,
    /// `k` must be at least 1.
    ZeroProbes,
    /// `k` must fit the 16-bit serialized field.
    TooManyProbes {
        /// Requested probe count.
        k: u32,
    },
    /// `word_bits` must be 32 or 64.
    UnsupportedWordBits {
        /// Requested word size.
        word_bits: u32,
    },
    /// `block_bits` must be a power of two.
    BlockNotPowerOfTwo {
        /// Requested block size.
        block_bits: u64,
    },
    /// `block_bits` must be at least `word_bits`.
    BlockSmallerThanWord {
        /// Requested block size.
        block_bits: u64,
        /// Requested word size.
        word_bits: u32,
    },
    /// Register-blocked filters require `block_bits == word_bits`.
    RegisterBlockMismatch {
        /// Requested block size.
        block_bits: u64,
        /// Requested word size.
        word_bits: u32,
    },
    /// Sectorized filters require `k` divisible by the words per block.
    SectorDivisibility {
        /// Probe bits per key.
        k: u32,
        /// Words per block.
        words_per_block: u32,
    },
    /// Cache-sectorized filters require at least one group.
    ZeroGroups,
    /// `groups` must fit the 16-bit serialized field.
    TooManyGroups {
        /// Requested group count.
        groups: u32,
    },
    /// Cache-sectorized filters require `groups <= words_per_block`.
    GroupsExceedWords {
        /// Requested group count.
        groups: u32,
        /// Words per block.
        words_per_block: u32,
    },
    /// Cache-sectorized filters require `groups` to divide the words per
    /// block.
    GroupDivisibility {
        /// Requested group count.
        groups: u32,
        /// Words per block.
        words_per_block: u32,
    },
    /// Cache-sectorized filters require `k` divisible by `groups`.
    GroupProbeDivisibility {
        /// Probe bits per key.
        k: u32,
        /// Requested group count.
        groups: u32,
    },
    /// Only cache-sectorized filters take a group count.
    GroupsNotApplicable {
        /// Requested group count.
        groups: u32,
    },
    /// The bulk-execution layout does not fit this block shape.
    Layout(LayoutError),
    /// Derived storage size overflows the address space.
    CapacityOverflow,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ConfigError::ZeroSize => write!(f, "filter size m must be at least 1 bit"),
            ConfigError::ZeroProbes => write!(f, "probe count k must be at least 1"),
            ConfigError::TooManyProbes { k } => {
                write!(f, "probe count k = {k} exceeds the supported maximum 65535")
            }
            ConfigError::UnsupportedWordBits { word_bits } => {
                write!(f, "word size S = {word_bits} is not supported (use 32 or 64)")
            }
            ConfigError::BlockNotPowerOfTwo { block_bits } => {
                write!(f, "block size B = {block_bits} is not a power of two")
            }
            ConfigError::BlockSmallerThanWord { block_bits, word_bits } => {
                write!(f, "block size B = {block_bits} is smaller than word size S = {word_bits}")
            }
            ConfigError::RegisterBlockMismatch { block_bits, word_bits } => write!(
                f,
                "register-blocked filters need B = S, got B = {block_bits}, S = {word_bits}"
            ),
            ConfigError::SectorDivisibility { k, words_per_block } => write!(
                f,
                "sectorized filters need k divisible by words per block: \
                 k = {k}, s = {words_per_block}"
            ),
            ConfigError::ZeroGroups => {
                write!(f, "cache-sectorized filters need at least one group")
            }
            ConfigError::TooManyGroups { groups } => {
                write!(f, "group count z = {groups} exceeds the supported maximum 65535")
            }
            ConfigError::GroupsExceedWords { groups, words_per_block } => write!(
                f,
                "group count z = {groups} exceeds words per block s = {words_per_block}"
            ),
            ConfigError::GroupDivisibility { groups, words_per_block } => write!(
                f,
                "group count z = {groups} must divide words per block s = {words_per_block}"
            ),
            ConfigError::GroupProbeDivisibility { k, groups } => write!(
                f,
                "cache-sectorized filters need k divisible by z: k = {k}, z = {groups}"
            ),
            ConfigError::GroupsNotApplicable { groups } => write!(
                f,
                "group count z = {groups} given, but only cache-sectorized filters use groups"
            ),
            ConfigError::Layout(err) => write!(f, "invalid execution layout: {err}"),
            ConfigError::CapacityOverflow => {
                write!(f, "derived storage size overflows the address space")
            }
        }
    }
}

impl core::error::Error for ConfigError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            ConfigError::Layout(err) => Some(err),
            _ => None,
        }
    }
}

impl From<LayoutError> for ConfigError {
    fn from(err: LayoutError) -> Self {
        ConfigError::Layout(err)
    }
}

impl FilterConfig {
    /// Classical filter of `m_bits` bits with `k` probes. The block size is
    /// set to the word size, so storage rounds up to whole words only.
    #[must_use]
    pub fn classical(m_bits: u64, k: u32, seed: u64) -> Self {
        Self {
            variant: Variant::Classical,
            m_bits,
            block_bits: 64,
            word_bits: 64,
            k,
            groups: 0,
            seed,
            layout: Layout::SCALAR,
        }
    }

    /// Blocked filter with `B = block_bits`-bit blocks of `word_bits` words.
    #[must_use]
    pub fn blocked(m_bits: u64, block_bits: u64, word_bits: u32, k: u32, seed: u64) -> Self {
        Self {
            variant: Variant::Blocked,
            m_bits,
            block_bits,
            word_bits,
            k,
            groups: 0,
            seed,
            layout: Layout::SCALAR,
        }
    }

    /// Register-blocked filter: one `word_bits`-bit word per block.
    #[must_use]
    pub fn register_blocked(m_bits: u64, word_bits: u32, k: u32, seed: u64) -> Self {
        Self {
            variant: Variant::RegisterBlocked,
            m_bits,
            block_bits: u64::from(word_bits),
            word_bits,
            k,
            groups: 0,
            seed,
            layout: Layout::SCALAR,
        }
    }

    /// Sectorized filter: every word of a block receives `k / s` probe bits.
    #[must_use]
    pub fn sectorized(m_bits: u64, block_bits: u64, word_bits: u32, k: u32, seed: u64) -> Self {
        Self {
            variant: Variant::Sectorized,
            m_bits,
            block_bits,
            word_bits,
            k,
            groups: 0,
            seed,
            layout: Layout::SCALAR,
        }
    }

    /// Cache-sectorized filter with `groups` word groups per block.
    #[must_use]
    pub fn cache_sectorized(
        m_bits: u64,
        block_bits: u64,
        word_bits: u32,
        k: u32,
        groups: u32,
        seed: u64,
    ) -> Self {
        Self {
            variant: Variant::CacheSectorized,
            m_bits,
            block_bits,
            word_bits,
            k,
            groups,
            seed,
            layout: Layout::SCALAR,
        }
    }

    /// Returns this configuration with a different bulk-execution layout.
    #[must_use]
    pub fn with_layout(mut self, layout: Layout) -> Self {
        self.layout = layout;
        self
    }

    /// Returns this configuration with a different seed.
    #[must_use]
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Validates every constraint and derives the storage geometry.
    ///
    /// This is the single authority on configuration validity; everything
    /// that builds or deserializes a filter goes through it.
    pub fn geometry(&self) -> Result<Geometry, ConfigError> {
        if self.m_bits == 0 {
            return Err(ConfigError::ZeroSize);
        }
        if self.k == 0 {
            return Err(ConfigError::ZeroProbes);
        }
        if self.k > u32::from(u16::MAX) {
            return Err(ConfigError::TooManyProbes { k: self.k });
        }
        if self.word_bits != 32 && self.word_bits != 64 {
            return Err(ConfigError::UnsupportedWordBits {
                word_bits: self.word_bits,
            });
        }
        if !self.block_bits.is_power_of_two() {
            return Err(ConfigError::BlockNotPowerOfTwo {
                block_bits: self.block_bits,
            });
        }
        if self.block_bits < u64::from(self.word_bits) {
            return Err(ConfigError::BlockSmallerThanWord {
                block_bits: self.block_bits,
                word_bits: self.word_bits,
            });
        }
        // Words per block; bounded so per-block indices stay in u32.
        let s_wide = self.block_bits / u64::from(self.word_bits);
        let words_per_block = u32::try_from(s_wide).map_err(|_| ConfigError::CapacityOverflow)?;

        match self.variant {
            Variant::Classical | Variant::Blocked => {
                if self.groups != 0 {
                    return Err(ConfigError::GroupsNotApplicable { groups: self.groups });
                }
            }
            Variant::RegisterBlocked => {
                if self.groups != 0 {
                    return Err(ConfigError::GroupsNotApplicable { groups: self.groups });
                }
                if self.block_bits != u64::from(self.word_bits) {
                    return Err(ConfigError::RegisterBlockMismatch {
                        block_bits: self.block_bits,
                        word_bits: self.word_bits,
                    });
                }
            }
            Variant::Sectorized => {
                if self.groups != 0 {
                    return Err(ConfigError::GroupsNotApplicable { groups: self.groups });
                }
                if self.k % words_per_block != 0 {
                    return Err(ConfigError::SectorDivisibility {
                        k: self.k,
                        words_per_block,
                    });
                }
            }
            Variant::CacheSectorized => {
                if self.groups == 0 {
                    return Err(ConfigError::ZeroGroups);
                }
                if self.groups > u32::from(u16::MAX) {
                    return Err(ConfigError::TooManyGroups { groups: self.groups });
                }
                if self.groups > words_per_block {
                    return Err(ConfigError::GroupsExceedWords {
                        groups: self.groups,
                        words_per_block,
                    });
                }
                if words_per_block % self.groups != 0 {
                    return Err(ConfigError::GroupDivisibility {
                        groups: self.groups,
                        words_per_block,
                    });
                }
                if self.k % self.groups != 0 {
                    return Err(ConfigError::GroupProbeDivisibility {
                        k: self.k,
                        groups: self.groups,
                    });
                }
            }
        }

        self.layout.validate_for(words_per_block)?;

        let blocks = self.m_bits.div_ceil(self.block_bits);
        let m_effective = blocks
            .checked_mul(self.block_bits)
            .ok_or(ConfigError::CapacityOverflow)?;
        let total_words = blocks
            .checked_mul(u64::from(words_per_block))
            .ok_or(ConfigError::CapacityOverflow)?;
        // Storage must be addressable as a slice.
        let total_bytes = total_words
            .checked_mul(u64::from(self.word_bits / 8))
            .ok_or(ConfigError::CapacityOverflow)?;
        if usize::try_from(total_bytes).is_err() {
            return Err(ConfigError::CapacityOverflow);
        }

        Ok(Geometry {
            blocks,
            words_per_block,
            m_effective,
            total_words,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_codes_and_names_roundtrip() {
        for variant in Variant::ALL {
            assert_eq!(Variant::from_code(variant.code()), Some(variant));
            assert_eq!(Variant::from_name(variant.name()), Some(variant));
            assert_eq!(
                Variant::from_name(&variant.name().to_uppercase()),
                Some(variant)
            );
        }
        assert_eq!(Variant::from_code(5), None);
        assert_eq!(Variant::from_name("bloom"), None);
        assert_eq!(Variant::from_name("a-very-long-name"), None);
    }

    #[test]
    fn geometry_rounds_up_to_whole_blocks() {
        // 1000 bits at B = 256: 4 blocks, 1024 effective bits, 16 words.
        let config = FilterConfig::sectorized(1000, 256, 64, 16, 1);
        let geom = config.geometry().unwrap();
        assert_eq!(geom.blocks, 4);
        assert_eq!(geom.words_per_block, 4);
        assert_eq!(geom.m_effective, 1024);
        assert_eq!(geom.total_words, 16);
    }

    #[test]
    fn exact_multiple_needs_no_rounding() {
        let config = FilterConfig::blocked(1 << 20, 512, 64, 8, 1);
        let geom = config.geometry().unwrap();
        assert_eq!(geom.blocks, (1 << 20) / 512);
        assert_eq!(geom.m_effective, 1 << 20);
        assert_eq!(geom.total_words, geom.blocks * 8);
    }

    #[test]
    fn register_blocked_requires_single_word_blocks() {
        let mut config = FilterConfig::register_blocked(1 << 16, 64, 8, 1);
        assert!(config.geometry().is_ok());
        config.block_bits = 128;
        assert_eq!(
            config.geometry(),
            Err(ConfigError::RegisterBlockMismatch {
                block_bits: 128,
                word_bits: 64
            })
        );
    }

    #[test]
    fn sectorized_requires_divisible_probe_count() {
        // B = 256, S = 64 -> s = 4; k = 6 is not divisible by 4.
        let config = FilterConfig::sectorized(1 << 16, 256, 64, 6, 1);
        assert_eq!(
            config.geometry(),
            Err(ConfigError::SectorDivisibility {
                k: 6,
                words_per_block: 4
            })
        );
        assert!(FilterConfig::sectorized(1 << 16, 256, 64, 8, 1)
            .geometry()
            .is_ok());
    }

    #[test]
    fn cache_sectorized_group_constraints() {
        let ok = FilterConfig::cache_sectorized(1 << 20, 1024, 64, 16, 4, 1);
        assert!(ok.geometry().is_ok());

        let zero = FilterConfig::cache_sectorized(1 << 20, 1024, 64, 16, 0, 1);
        assert_eq!(zero.geometry(), Err(ConfigError::ZeroGroups));

        let too_many = FilterConfig::cache_sectorized(1 << 20, 1024, 64, 32, 32, 1);
        assert_eq!(
            too_many.geometry(),
            Err(ConfigError::GroupsExceedWords {
                groups: 32,
                words_per_block: 16
            })
        );

        // z = 3 divides neither s = 16 nor k = 16 cleanly; the word-count
        // divisibility check fires first.
        let ragged = FilterConfig::cache_sectorized(1 << 20, 1024, 64, 16, 3, 1);
        assert_eq!(
            ragged.geometry(),
            Err(ConfigError::GroupDivisibility {
                groups: 3,
                words_per_block: 16
            })
        );

        let probes = FilterConfig::cache_sectorized(1 << 20, 1024, 64, 12, 8, 1);
        assert_eq!(
            probes.geometry(),
            Err(ConfigError::GroupProbeDivisibility { k: 12, groups: 8 })
        );
    }

    #[test]
    fn groups_are_rejected_outside_cache_sectorized() {
        let mut config = FilterConfig::sectorized(1 << 16, 256, 64, 8, 1);
        config.groups = 2;
        assert_eq!(
            config.geometry(),
            Err(ConfigError::GroupsNotApplicable { groups: 2 })
        );
    }

    #[test]
    fn degenerate_and_invalid_parameters_are_rejected() {
        assert_eq!(
            FilterConfig::classical(0, 16, 1).geometry(),
            Err(ConfigError::ZeroSize)
        );
        assert_eq!(
            FilterConfig::classical(1 << 10, 0, 1).geometry(),
            Err(ConfigError::ZeroProbes)
        );
        assert_eq!(
            FilterConfig::classical(1 << 10, 1 << 20, 1).geometry(),
            Err(ConfigError::TooManyProbes { k: 1 << 20 })
        );
        assert_eq!(
            FilterConfig::blocked(1 << 10, 192, 64, 4, 1).geometry(),
            Err(ConfigError::BlockNotPowerOfTwo { block_bits: 192 })
        );
        assert_eq!(
            FilterConfig::blocked(1 << 10, 32, 64, 4, 1).geometry(),
            Err(ConfigError::BlockSmallerThanWord {
                block_bits: 32,
                word_bits: 64
            })
        );
        let mut bad_word = FilterConfig::classical(1 << 10, 4, 1);
        bad_word.word_bits = 16;
        bad_word.block_bits = 64;
        assert_eq!(
            bad_word.geometry(),
            Err(ConfigError::UnsupportedWordBits { word_bits: 16 })
        );
    }

    #[test]
    fn layout_must_fit_block_shape() {
        let config = FilterConfig::sectorized(1 << 16, 256, 64, 8, 1)
            .with_layout(Layout::new(4, 2).unwrap());
        assert_eq!(
            config.geometry(),
            Err(ConfigError::Layout(LayoutError::ExceedsWordsPerBlock {
                theta: 4,
                phi: 2,
                words_per_block: 4
            }))
        );
        let fits = FilterConfig::sectorized(1 << 16, 256, 64, 8, 1)
            .with_layout(Layout::new(2, 2).unwrap());
        assert!(fits.geometry().is_ok());
    }

    #[test]
    fn word_sizes_32_and_64_both_work() {
        let w32 = FilterConfig {
            variant: Variant::Sectorized,
            m_bits: 1 << 16,
            block_bits: 256,
            word_bits: 32,
            k: 8,
            groups: 0,
            seed: 1,
            layout: Layout::SCALAR,
        };
        let geom = w32.geometry().unwrap();
        assert_eq!(geom.words_per_block, 8);
    }
}

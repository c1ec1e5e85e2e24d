//! Portable serialized form of a filter.
//!
//! Layout (all integers little-endian):
//!
//! | offset | size | field                                  |
//! |--------|------|----------------------------------------|
//! | 0      | 4    | magic `"BLMV"`                         |
//! | 4      | 2    | format version (1)                     |
//! | 6      | 1    | variant code                           |
//! | 7      | 1    | word bits `S`                          |
//! | 8      | 2    | probe bits `k`                         |
//! | 10     | 2    | groups `z` (0 when not cache-sectorized) |
//! | 12     | 2    | reserved (0)                           |
//! | 14     | 8    | requested size `m` in bits             |
//! | 22     | 8    | block bits `B`                         |
//! | 30     | 8    | seed                                   |
//! | 38     | 8    | word count                             |
//! | 46     | …    | words, little-endian                   |
//!
//! The execution layout is deliberately not part of the format: it changes
//! the schedule of a bulk operation, not the contents of the filter, so two
//! filters that differ only in layout serialize identically. Deserialized
//! filters start with the default lookup layout.

use alloc::vec::Vec;
use core::fmt;

use crate::config::{ConfigError, FilterConfig, Variant};
use crate::filter::{Filter, FilterError};
use crate::layout::Layout;

/// File magic.
pub const MAGIC: [u8; 4] = *b"BLMV";
/// Current format version.
pub const VERSION: u16 = 1;
/// Serialized header size in bytes.
pub const HEADER_LEN: usize = 46;

/// A malformed or mismatched serialized filter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodecError {
    /// Fewer bytes than a header.
    TooShort {
        /// Bytes available.
        got: usize,
    },
    /// Magic bytes are not `"BLMV"`.
    BadMagic {
        /// The bytes found.
        found: [u8; 4],
    },
    /// Unknown format version.
    UnsupportedVersion {
        /// The version found.
        found: u16,
    },
    /// Unknown variant code.
    UnknownVariant {
        /// The code found.
        found: u8,
    },
    /// Reserved header field is non-zero.
    ReservedNonZero,
    /// The header's parameters violate configuration constraints.
    Config(ConfigError),
    /// The header's word count disagrees with the geometry derived from its
    /// own parameters.
    WordCountMismatch {
        /// Word count the geometry requires.
        expected: u64,
        /// Word count the header declares.
        declared: u64,
    },
    /// The payload is shorter than the declared word count.
    TruncatedPayload {
        /// Bytes the payload needs.
        expected: usize,
        /// Bytes present.
        got: usize,
    },
    /// Extra bytes follow the payload.
    TrailingBytes {
        /// Number of unexpected trailing bytes.
        extra: usize,
    },
    /// Storage allocation for the decoded filter failed.
    Alloc,
}

impl fmt::Display for CodecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CodecError::TooShort { got } => {
                write!(f, "serialized filter needs at least {HEADER_LEN} header bytes, got {got}")
            }
            CodecError::BadMagic { found } => write!(f, "bad magic {found:02X?}"),
            CodecError::UnsupportedVersion { found } => {
                write!(f, "unsupported format version {found} (expected {VERSION})")
            }
            CodecError::UnknownVariant { found } => write!(f, "unknown variant code {found}"),
            CodecError::ReservedNonZero => write!(f, "reserved header field is non-zero"),
            CodecError::Config(err) => write!(f, "serialized configuration is invalid: {err}"),
            CodecError::WordCountMismatch { expected, declared } => write!(
                f,
                "declared word count {declared} does not match the geometry ({expected} words)"
            ),
            CodecError::TruncatedPayload { expected, got } => {
                write!(f, "payload truncated: expected {expected} bytes, got {got}")
            }
            CodecError::TrailingBytes { extra } => {
                write!(f, "{extra} unexpected bytes after the payload")
            }
            CodecError::Alloc => write!(f, "failed to allocate storage for the decoded filter"),
        }
    }
}

impl core::error::Error for CodecError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            CodecError::Config(err) => Some(err),
            _ => None,
        }
    }
}

/// Serializes a filter.
#[must_use]
pub fn serialize(filter: &Filter) -> Vec<u8> {
    let config = filter.config();
    let geometry = filter.geometry();
    let payload = filter.snapshot_le();
    let mut bytes = Vec::with_capacity(HEADER_LEN + payload.len());
    bytes.extend_from_slice(&MAGIC);
    bytes.extend_from_slice(&VERSION.to_le_bytes());
    bytes.push(config.variant.code());
    bytes.push(config.word_bits as u8);
    bytes.extend_from_slice(&(config.k as u16).to_le_bytes());
    bytes.extend_from_slice(&(config.groups as u16).to_le_bytes());
    bytes.extend_from_slice(&0u16.to_le_bytes());
    bytes.extend_from_slice(&config.m_bits.to_le_bytes());
    bytes.extend_from_slice(&config.block_bits.to_le_bytes());
    bytes.extend_from_slice(&config.seed.to_le_bytes());
    bytes.extend_from_slice(&geometry.total_words.to_le_bytes());
    bytes.extend_from_slice(&payload);
    debug_assert_eq!(bytes.len(), HEADER_LEN + payload.len());
    bytes
}

fn read_u16(bytes: &[u8], offset: usize) -> u16 {
    u16::from_le_bytes(bytes[offset..offset + 2].try_into().unwrap())
}

fn read_u64(bytes: &[u8], offset: usize) -> u64 {
    u64::from_le_bytes(bytes[offset..offset + 8].try_into().unwrap())
}

/// Deserializes a filter, validating the header against the configuration
/// rules and the payload length against the derived geometry.
pub fn deserialize(bytes: &[u8]) -> Result<Filter, CodecError> {
    if bytes.len() < HEADER_LEN {
        return Err(CodecError::TooShort { got: bytes.len() });
    }
    if bytes[..4] != MAGIC {
        return Err(CodecError::BadMagic {
            found: bytes[..4].try_into().unwrap(),
        });
    }
    let version = read_u16(bytes, 4);
    if version != VERSION {
        return Err(CodecError::UnsupportedVersion { found: version });
    }
    let variant =
        Variant::from_code(bytes[6]).ok_or(CodecError::UnknownVariant { found: bytes[6] })?;
    let word_bits = u32::from(bytes[7]);
    let k = u32::from(read_u16(bytes, 8));
    let groups = u32::from(read_u16(bytes, 10));
    if read_u16(bytes, 12) != 0 {
        return Err(CodecError::ReservedNonZero);
    }
    let m_bits = read_u64(bytes, 14);
    let block_bits = read_u64(bytes, 22);
    let seed = read_u64(bytes, 30);
    let declared_words = read_u64(bytes, 38);

    let mut config = FilterConfig {
        variant,
        m_bits,
        block_bits,
        word_bits,
        k,
        groups,
        seed,
        layout: Layout::SCALAR,
    };
    let geometry = config.geometry().map_err(CodecError::Config)?;
    config.layout = Layout::lookup_default(geometry.words_per_block);

    if geometry.total_words != declared_words {
        return Err(CodecError::WordCountMismatch {
            expected: geometry.total_words,
            declared: declared_words,
        });
    }
    let payload_len = (geometry.total_words as usize) * (word_bits as usize / 8);
    let got = bytes.len() - HEADER_LEN;
    if got < payload_len {
        return Err(CodecError::TruncatedPayload {
            expected: payload_len,
            got,
        });
    }
    if got > payload_len {
        return Err(CodecError::TrailingBytes {
            extra: got - payload_len,
        });
    }

    let filter = Filter::new(config).map_err(|err| match err {
        FilterError::Config(err) => CodecError::Config(err),
        FilterError::Alloc(_) => CodecError::Alloc,
        FilterError::WordWidthMismatch { .. } => {
            unreachable!("width was validated by geometry()")
        }
    })?;
    let payload = &bytes[HEADER_LEN..];
    match &filter {
        Filter::W32(core) => core.load_snapshot_le(payload),
        Filter::W64(core) => core.load_snapshot_le(payload),
    }
    Ok(filter)
}

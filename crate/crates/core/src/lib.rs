//! Parametric approximate-membership filters with portable, correctness-
//! visible vectorization schedules.
//!
//! The crate implements one storage and execution engine shared by five
//! filter organisations — classical, blocked, register-blocked, sectorized,
//! and cache-sectorized — that differ only in where a key's `k` probe bits
//! land:
//!
//! * [`Variant::Classical`]: anywhere in the `m`-bit array (the textbook
//!   filter; best rate, worst locality: up to `k` cache misses per lookup);
//! * [`Variant::Blocked`]: all inside one `B`-bit block chosen by the key
//!   (one cache line per lookup when `B` is a cache line);
//! * [`Variant::RegisterBlocked`]: the block is a single machine word;
//! * [`Variant::Sectorized`]: each of the block's `s = B/S` words receives
//!   exactly `k/s` bits, making per-word probe masks independent and cheap;
//! * [`Variant::CacheSectorized`]: the block's words form `z` groups, each
//!   group selects one word for its `k/z` bits, so a lookup touches `z`
//!   words of the block instead of all `s`.
//!
//! Every operation hashes its key exactly once (xxHash64); all positions are
//! derived from that value by multiplicative remixing with per-purpose odd
//! salts ([`pattern`]). Bulk operations walk block words on a configurable
//! [`Layout`] `(Θ, Φ)` schedule that models cooperative lanes with chunked
//! word access; the schedule is observable only as performance, never in the
//! resulting bits, and [`oracle`] exists to prove exactly that.
//!
//! [`analytics`] carries the closed-form sizing used to choose loads and to
//! judge measured false-positive rates; [`codec`] gives filters a portable
//! serialized form.
//!
//! The crate is `no_std` (with `alloc`) unless the default `std` feature is
//! enabled, which adds multi-threaded bulk operations.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod analytics;
pub mod codec;
mod config;
mod filter;
pub mod hash;
mod keys;
mod layout;
mod mix;
pub mod oracle;
pub mod pattern;
mod salt;
mod storage;

pub use config::{ConfigError, FilterConfig, Geometry, Variant};
pub use filter::{Filter, FilterCore, FilterError};
pub use keys::{disjoint_key_sets, UniqueKeys};
pub use layout::{Layout, LayoutError};
pub use mix::{mix64, SplitMix64};
pub use salt::SaltTable;
pub use storage::{AlignedAtomics, AllocError, FilterWord, STORAGE_ALIGN};

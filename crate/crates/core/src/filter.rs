//! The filter engine: one storage and execution core shared by all five
//! variants, plus the word-width-erased [`Filter`] front end.
//!
//! Bulk operations process keys in strips: a strip is hashed first (one base
//! hash per key — the only time the key is touched), then each key's probe
//! pattern is placed or tested by walking its block's words in the order
//! given by the configured [`Layout`]. The layout changes the schedule of
//! word accesses, never the resulting bits or answers, which is what makes
//! layout search safe.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::config::{ConfigError, FilterConfig, Geometry, Variant};
use crate::hash::{xxh64, xxh64_u64};
use crate::layout::{Layout, LayoutError};
use crate::pattern::{self, fill_block_masks};
use crate::salt::SaltTable;
use crate::storage::{self, AlignedAtomics, AllocError, FilterWord};

/// Keys hashed per strip of the bulk engine. Mirrors the width of one
/// cooperative lane group so that scheduling behaviour is stable across
/// input sizes.
const STRIP: usize = 32;

/// Storage size at which bulk strips start prefetching: arrays this large
/// (16 MiB) outgrow typical last-level caches, so a probe's cache line
/// should be requested while the rest of its strip is still being hashed.
const PREFETCH_MIN_BYTES: u64 = 1 << 24;

/// Probe counts above this skip the classical prefetch pass; the memory
/// window is saturated long before, and recomputing that many positions
/// twice would cost more than the hint returns.
const PREFETCH_MAX_K: u32 = 64;

/// Failure to construct a filter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterError {
    /// The configuration violates a constraint.
    Config(ConfigError),
    /// The configuration is valid but backing storage was refused by the
    /// allocator (distinct so callers can degrade gracefully on huge
    /// requests).
    Alloc(AllocError),
    /// The compile-time word type does not match `config.word_bits`.
    WordWidthMismatch {
        /// Word width of the `FilterCore` type instantiated.
        type_bits: u32,
        /// Word width the configuration asked for.
        config_bits: u32,
    },
}

impl fmt::Display for FilterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterError::Config(err) => write!(f, "invalid filter configuration: {err}"),
            FilterError::Alloc(err) => write!(f, "{err}"),
            FilterError::WordWidthMismatch { type_bits, config_bits } => write!(
                f,
                "filter word type is {type_bits}-bit but the configuration wants {config_bits}-bit words"
            ),
        }
    }
}

impl core::error::Error for FilterError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            FilterError::Config(err) => Some(err),
            FilterError::Alloc(err) => Some(err),
            FilterError::WordWidthMismatch { .. } => None,
        }
    }
}

impl From<ConfigError> for FilterError {
    fn from(err: ConfigError) -> Self {
        FilterError::Config(err)
    }
}

impl From<AllocError> for FilterError {
    fn from(err: AllocError) -> Self {
        FilterError::Alloc(err)
    }
}

/// A filter instantiated over a concrete word type.
///
/// All mutation goes through relaxed atomic ORs, so a `&FilterCore` can be
/// shared freely across threads for concurrent insertion and lookup; the
/// final bit pattern is independent of interleaving.
pub struct FilterCore<W: FilterWord> {
    config: FilterConfig,
    geometry: Geometry,
    salts: SaltTable,
    words: AlignedAtomics<W>,
    /// Whether bulk strips issue software prefetches between the hashing
    /// pass and the probe pass. Worth it only once the array outgrows the
    /// last-level cache; purely a speed hint either way.
    prefetch: bool,
}

impl<W: FilterWord> FilterCore<W> {
    /// Validates `config`, derives the geometry, and allocates zeroed
    /// storage.
    pub fn new(config: FilterConfig) -> Result<Self, FilterError> {
        if W::BITS != config.word_bits {
            return Err(FilterError::WordWidthMismatch {
                type_bits: W::BITS,
                config_bits: config.word_bits,
            });
        }
        let geometry = config.geometry()?;
        let words = AlignedAtomics::new_zeroed(geometry.total_words as usize)?;
        let salts = SaltTable::generate(config.seed, config.k, geometry.words_per_block);
        let prefetch = geometry.total_words.saturating_mul(W::BYTES as u64) >= PREFETCH_MIN_BYTES;
        Ok(Self {
            config,
            geometry,
            salts,
            words,
            prefetch,
        })
    }

    /// The configuration this filter was built from.
    #[inline]
    #[must_use]
    pub fn config(&self) -> &FilterConfig {
        &self.config
    }

    /// The derived storage geometry.
    #[inline]
    #[must_use]
    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    /// The salt table derived from the seed.
    #[inline]
    #[must_use]
    pub fn salts(&self) -> &SaltTable {
        &self.salts
    }

    /// Base hash of a `u64` key under this filter's seed. All probe
    /// positions derive from this one value.
    #[inline]
    #[must_use]
    pub fn hash_key(&self, key: u64) -> u64 {
        xxh64_u64(key, self.config.seed)
    }

    /// Base hash of a byte-string key under this filter's seed.
    #[inline]
    #[must_use]
    pub fn hash_bytes(&self, key: &[u8]) -> u64 {
        xxh64(key, self.config.seed)
    }

    pub(crate) fn cells(&self) -> &[W::Atomic] {
        self.words.cells()
    }

    // ----- single-key operations -----

    /// Inserts one key (scalar schedule).
    pub fn add(&self, key: u64) {
        self.add_hash(self.hash_key(key));
    }

    /// Inserts one byte-string key (scalar schedule).
    pub fn add_bytes(&self, key: &[u8]) {
        self.add_hash(self.hash_bytes(key));
    }

    /// Tests one key. `false` is definitive; `true` may be a false positive.
    #[must_use]
    pub fn contains(&self, key: u64) -> bool {
        self.contains_hash(self.hash_key(key))
    }

    /// Tests one byte-string key.
    #[must_use]
    pub fn contains_bytes(&self, key: &[u8]) -> bool {
        self.contains_hash(self.hash_bytes(key))
    }

    fn add_hash(&self, h: u64) {
        let cells = self.cells();
        match self.config.variant {
            Variant::Classical => {
                for i in 0..self.config.k {
                    let pos = pattern::global_position(
                        h,
                        self.salts.bit_salt(i),
                        self.geometry.m_effective,
                    );
                    W::atomic_or(
                        &cells[(pos >> W::BITS_LOG2) as usize],
                        W::bit(pos as u32 & (W::BITS - 1)),
                    );
                }
            }
            variant => {
                // One block; word at a time (the scalar layout).
                let s = self.geometry.words_per_block as usize;
                let mut masks = vec![W::ZERO; s];
                fill_block_masks(h, variant, self.config.k, self.config.groups, &self.salts, &mut masks);
                let base = (self.block_of(h) * s as u64) as usize;
                for (w, &mask) in masks.iter().enumerate() {
                    if !mask.is_zero() {
                        W::atomic_or(&cells[base + w], mask);
                    }
                }
            }
        }
    }

    fn contains_hash(&self, h: u64) -> bool {
        let cells = self.cells();
        match self.config.variant {
            Variant::Classical => {
                for i in 0..self.config.k {
                    let pos = pattern::global_position(
                        h,
                        self.salts.bit_salt(i),
                        self.geometry.m_effective,
                    );
                    let word = W::atomic_load(&cells[(pos >> W::BITS_LOG2) as usize]);
                    if !word.contains_all(W::bit(pos as u32 & (W::BITS - 1))) {
                        return false;
                    }
                }
                true
            }
            variant => {
                let s = self.geometry.words_per_block as usize;
                let mut masks = vec![W::ZERO; s];
                fill_block_masks(h, variant, self.config.k, self.config.groups, &self.salts, &mut masks);
                let base = (self.block_of(h) * s as u64) as usize;
                masks.iter().enumerate().all(|(w, &mask)| {
                    mask.is_zero() || W::atomic_load(&cells[base + w]).contains_all(mask)
                })
            }
        }
    }

    #[inline]
    fn block_of(&self, h: u64) -> u64 {
        pattern::block_index(h, self.salts.block_salt(), self.geometry.blocks)
    }

    // ----- bulk operations -----

    /// Inserts a batch of keys under the configuration's layout.
    pub fn bulk_add(&self, keys: &[u64]) {
        // The configured layout was validated with the geometry.
        self.bulk_add_unchecked(keys, self.config.layout);
    }

    /// Inserts a batch of keys under an explicit layout override.
    pub fn bulk_add_with(&self, keys: &[u64], layout: Layout) -> Result<(), LayoutError> {
        layout.validate_for(self.geometry.words_per_block)?;
        self.bulk_add_unchecked(keys, layout);
        Ok(())
    }

    /// Tests a batch of keys under the configuration's layout.
    #[must_use]
    pub fn bulk_contains(&self, keys: &[u64]) -> Vec<bool> {
        let mut out = vec![false; keys.len()];
        self.bulk_contains_unchecked(keys, self.config.layout, &mut out);
        out
    }

    /// Tests a batch of keys under an explicit layout override.
    pub fn bulk_contains_with(
        &self,
        keys: &[u64],
        layout: Layout,
    ) -> Result<Vec<bool>, LayoutError> {
        let mut out = vec![false; keys.len()];
        self.bulk_contains_into(keys, layout, &mut out)?;
        Ok(out)
    }

    /// Tests a batch of keys into a caller-provided buffer
    /// (`out.len() == keys.len()`).
    pub fn bulk_contains_into(
        &self,
        keys: &[u64],
        layout: Layout,
        out: &mut [bool],
    ) -> Result<(), LayoutError> {
        assert_eq!(keys.len(), out.len(), "result buffer length mismatch");
        layout.validate_for(self.geometry.words_per_block)?;
        self.bulk_contains_unchecked(keys, layout, out);
        Ok(())
    }

    /// Issues prefetches for the `k` classical probe words of `h`.
    #[inline]
    fn prefetch_classical_probes(&self, cells: &[W::Atomic], h: u64) {
        for i in 0..self.config.k {
            let pos = pattern::global_position(h, self.salts.bit_salt(i), self.geometry.m_effective);
            storage::prefetch_read(&cells[(pos >> W::BITS_LOG2) as usize]);
        }
    }

    fn bulk_add_unchecked(&self, keys: &[u64], layout: Layout) {
        let cells = self.cells();
        let mut hashes = [0u64; STRIP];
        match self.config.variant {
            Variant::Classical => {
                let prefetch = self.prefetch && self.config.k <= PREFETCH_MAX_K;
                for strip in keys.chunks(STRIP) {
                    let hashes = &mut hashes[..strip.len()];
                    for (h, &key) in hashes.iter_mut().zip(strip) {
                        *h = self.hash_key(key);
                    }
                    if prefetch {
                        for &h in hashes.iter() {
                            self.prefetch_classical_probes(cells, h);
                        }
                    }
                    for &h in hashes.iter() {
                        for i in 0..self.config.k {
                            let pos = pattern::global_position(
                                h,
                                self.salts.bit_salt(i),
                                self.geometry.m_effective,
                            );
                            W::atomic_or(
                                &cells[(pos >> W::BITS_LOG2) as usize],
                                W::bit(pos as u32 & (W::BITS - 1)),
                            );
                        }
                    }
                }
            }
            variant => {
                let s = self.geometry.words_per_block;
                let lane_span = layout.theta() * layout.phi();
                let steps = s / lane_span;
                let mut masks = vec![W::ZERO; s as usize];
                let mut bases = [0usize; STRIP];
                for strip in keys.chunks(STRIP) {
                    let hashes = &mut hashes[..strip.len()];
                    let bases = &mut bases[..strip.len()];
                    for ((h, base), &key) in hashes.iter_mut().zip(bases.iter_mut()).zip(strip) {
                        *h = self.hash_key(key);
                        *base = (self.block_of(*h) * u64::from(s)) as usize;
                        if self.prefetch {
                            storage::prefetch_lines(&cells[*base..*base + s as usize]);
                        }
                    }
                    for (&h, &base) in hashes.iter().zip(bases.iter()) {
                        fill_block_masks(
                            h,
                            variant,
                            self.config.k,
                            self.config.groups,
                            &self.salts,
                            &mut masks,
                        );
                        for step in 0..steps {
                            for lane in 0..layout.theta() {
                                let first = step * lane_span + lane * layout.phi();
                                for w in first..first + layout.phi() {
                                    let mask = masks[w as usize];
                                    if !mask.is_zero() {
                                        W::atomic_or(&cells[base + w as usize], mask);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    fn bulk_contains_unchecked(&self, keys: &[u64], layout: Layout, out: &mut [bool]) {
        let cells = self.cells();
        let mut hashes = [0u64; STRIP];
        match self.config.variant {
            Variant::Classical => {
                let prefetch = self.prefetch && self.config.k <= PREFETCH_MAX_K;
                for (strip, results) in keys.chunks(STRIP).zip(out.chunks_mut(STRIP)) {
                    let hashes = &mut hashes[..strip.len()];
                    for (h, &key) in hashes.iter_mut().zip(strip) {
                        *h = self.hash_key(key);
                    }
                    if prefetch {
                        for &h in hashes.iter() {
                            self.prefetch_classical_probes(cells, h);
                        }
                    }
                    for (&h, result) in hashes.iter().zip(results) {
                        *result = (0..self.config.k).all(|i| {
                            let pos = pattern::global_position(
                                h,
                                self.salts.bit_salt(i),
                                self.geometry.m_effective,
                            );
                            W::atomic_load(&cells[(pos >> W::BITS_LOG2) as usize])
                                .contains_all(W::bit(pos as u32 & (W::BITS - 1)))
                        });
                    }
                }
            }
            variant => {
                let s = self.geometry.words_per_block;
                let lane_span = layout.theta() * layout.phi();
                let steps = s / lane_span;
                let mut masks = vec![W::ZERO; s as usize];
                let mut bases = [0usize; STRIP];
                for (strip, results) in keys.chunks(STRIP).zip(out.chunks_mut(STRIP)) {
                    let hashes = &mut hashes[..strip.len()];
                    let bases = &mut bases[..strip.len()];
                    for ((h, base), &key) in hashes.iter_mut().zip(bases.iter_mut()).zip(strip) {
                        *h = self.hash_key(key);
                        *base = (self.block_of(*h) * u64::from(s)) as usize;
                        if self.prefetch {
                            storage::prefetch_lines(&cells[*base..*base + s as usize]);
                        }
                    }
                    for ((&h, &base), result) in hashes.iter().zip(bases.iter()).zip(results) {
                        fill_block_masks(
                            h,
                            variant,
                            self.config.k,
                            self.config.groups,
                            &self.salts,
                            &mut masks,
                        );
                        let mut hit = true;
                        for step in 0..steps {
                            for lane in 0..layout.theta() {
                                let first = step * lane_span + lane * layout.phi();
                                // Φ consecutive words per lane-step; words
                                // without probe bits are skipped (for the
                                // cache-sectorized variant that is the whole
                                // point: only z of s words are touched).
                                for w in first..first + layout.phi() {
                                    let mask = masks[w as usize];
                                    if !mask.is_zero() {
                                        hit &= W::atomic_load(&cells[base + w as usize])
                                            .contains_all(mask);
                                    }
                                }
                            }
                        }
                        *result = hit;
                    }
                }
            }
        }
    }

    // ----- multi-worker bulk operations -----

    /// Inserts a batch using `workers` threads (capped at the batch length;
    /// 0 is treated as 1). Safe because insertions are relaxed atomic ORs:
    /// the result is bit-identical to the serial insertion of the same keys.
    #[cfg(feature = "std")]
    pub fn bulk_add_parallel(&self, keys: &[u64], workers: usize) {
        // The configured layout was validated with the geometry.
        let _ = self.bulk_add_parallel_with(keys, self.config.layout, workers);
    }

    /// [`FilterCore::bulk_add_parallel`] with a layout override.
    #[cfg(feature = "std")]
    pub fn bulk_add_parallel_with(
        &self,
        keys: &[u64],
        layout: Layout,
        workers: usize,
    ) -> Result<(), LayoutError> {
        layout.validate_for(self.geometry.words_per_block)?;
        let workers = workers.clamp(1, keys.len().max(1));
        if workers == 1 {
            self.bulk_add_unchecked(keys, layout);
            return Ok(());
        }
        let chunk = keys.len().div_ceil(workers);
        std::thread::scope(|scope| {
            for part in keys.chunks(chunk) {
                scope.spawn(move || self.bulk_add_unchecked(part, layout));
            }
        });
        Ok(())
    }

    /// Tests a batch using `workers` threads. Answers are positionally
    /// identical to the serial path.
    #[cfg(feature = "std")]
    #[must_use]
    pub fn bulk_contains_parallel(&self, keys: &[u64], workers: usize) -> Vec<bool> {
        self.bulk_contains_parallel_with(keys, self.config.layout, workers)
            .expect("configured layout is valid by construction")
    }

    /// [`FilterCore::bulk_contains_parallel`] with a layout override.
    #[cfg(feature = "std")]
    pub fn bulk_contains_parallel_with(
        &self,
        keys: &[u64],
        layout: Layout,
        workers: usize,
    ) -> Result<Vec<bool>, LayoutError> {
        let mut out = vec![false; keys.len()];
        self.bulk_contains_parallel_into(keys, layout, workers, &mut out)?;
        Ok(out)
    }

    /// [`FilterCore::bulk_contains_parallel`] into a caller-provided buffer
    /// (`out.len() == keys.len()`), for callers that reuse buffers across
    /// batches.
    #[cfg(feature = "std")]
    pub fn bulk_contains_parallel_into(
        &self,
        keys: &[u64],
        layout: Layout,
        workers: usize,
        out: &mut [bool],
    ) -> Result<(), LayoutError> {
        assert_eq!(keys.len(), out.len(), "result buffer length mismatch");
        layout.validate_for(self.geometry.words_per_block)?;
        let workers = workers.clamp(1, keys.len().max(1));
        if workers == 1 {
            self.bulk_contains_unchecked(keys, layout, out);
            return Ok(());
        }
        let chunk = keys.len().div_ceil(workers);
        std::thread::scope(|scope| {
            for (part, slot) in keys.chunks(chunk).zip(out.chunks_mut(chunk)) {
                scope.spawn(move || self.bulk_contains_unchecked(part, layout, slot));
            }
        });
        Ok(())
    }

    // ----- introspection -----

    /// Number of set bits.
    #[must_use]
    pub fn popcount(&self) -> u64 {
        self.cells()
            .iter()
            .map(|cell| u64::from(W::atomic_load(cell).count_ones()))
            .sum()
    }

    /// Fraction of set bits relative to the effective capacity.
    #[must_use]
    pub fn fill_ratio(&self) -> f64 {
        self.popcount() as f64 / self.geometry.m_effective as f64
    }

    /// The bit array as little-endian bytes (word by word). Two filters hold
    /// identical contents iff their snapshots are equal; this is also the
    /// payload layout of the serialized form.
    #[must_use]
    pub fn snapshot_le(&self) -> Vec<u8> {
        let cells = self.cells();
        let mut bytes = vec![0u8; cells.len() * W::BYTES];
        for (cell, chunk) in cells.iter().zip(bytes.chunks_exact_mut(W::BYTES)) {
            W::atomic_load(cell).write_le(chunk);
        }
        bytes
    }

    pub(crate) fn load_snapshot_le(&self, bytes: &[u8]) {
        debug_assert_eq!(bytes.len(), self.cells().len() * W::BYTES);
        for (cell, chunk) in self.cells().iter().zip(bytes.chunks_exact(W::BYTES)) {
            W::atomic_or(cell, W::read_le(chunk));
        }
    }
}

impl<W: FilterWord> fmt::Debug for FilterCore<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FilterCore")
            .field("config", &self.config)
            .field("geometry", &self.geometry)
            .finish_non_exhaustive()
    }
}

/// A filter over either word width, dispatched at runtime from
/// [`FilterConfig::word_bits`].
#[derive(Debug)]
pub enum Filter {
    /// 32-bit words.
    W32(FilterCore<u32>),
    /// 64-bit words.
    W64(FilterCore<u64>),
}

macro_rules! with_core {
    ($self:expr, $core:ident => $body:expr) => {
        match $self {
            Filter::W32($core) => $body,
            Filter::W64($core) => $body,
        }
    };
}

impl Filter {
    /// Builds a filter of the word width named by the configuration.
    pub fn new(config: FilterConfig) -> Result<Self, FilterError> {
        // Validate first so the width dispatch below only sees 32 or 64.
        config.geometry()?;
        match config.word_bits {
            32 => Ok(Filter::W32(FilterCore::new(config)?)),
            64 => Ok(Filter::W64(FilterCore::new(config)?)),
            _ => unreachable!("geometry() rejects unsupported word widths"),
        }
    }

    /// Word width in bits (32 or 64).
    #[must_use]
    pub fn word_bits(&self) -> u32 {
        match self {
            Filter::W32(_) => 32,
            Filter::W64(_) => 64,
        }
    }

    /// The configuration this filter was built from.
    #[must_use]
    pub fn config(&self) -> &FilterConfig {
        with_core!(self, core => core.config())
    }

    /// The derived storage geometry.
    #[must_use]
    pub fn geometry(&self) -> &Geometry {
        with_core!(self, core => core.geometry())
    }

    /// Inserts one key.
    pub fn add(&self, key: u64) {
        with_core!(self, core => core.add(key));
    }

    /// Inserts one byte-string key.
    pub fn add_bytes(&self, key: &[u8]) {
        with_core!(self, core => core.add_bytes(key));
    }

    /// Tests one key.
    #[must_use]
    pub fn contains(&self, key: u64) -> bool {
        with_core!(self, core => core.contains(key))
    }

    /// Tests one byte-string key.
    #[must_use]
    pub fn contains_bytes(&self, key: &[u8]) -> bool {
        with_core!(self, core => core.contains_bytes(key))
    }

    /// Inserts a batch under the configured layout.
    pub fn bulk_add(&self, keys: &[u64]) {
        with_core!(self, core => core.bulk_add(keys));
    }

    /// Inserts a batch under a layout override.
    pub fn bulk_add_with(&self, keys: &[u64], layout: Layout) -> Result<(), LayoutError> {
        with_core!(self, core => core.bulk_add_with(keys, layout))
    }

    /// Tests a batch under the configured layout.
    #[must_use]
    pub fn bulk_contains(&self, keys: &[u64]) -> Vec<bool> {
        with_core!(self, core => core.bulk_contains(keys))
    }

    /// Tests a batch under a layout override.
    pub fn bulk_contains_with(
        &self,
        keys: &[u64],
        layout: Layout,
    ) -> Result<Vec<bool>, LayoutError> {
        with_core!(self, core => core.bulk_contains_with(keys, layout))
    }

    /// Inserts a batch with `workers` threads.
    #[cfg(feature = "std")]
    pub fn bulk_add_parallel(&self, keys: &[u64], workers: usize) {
        with_core!(self, core => core.bulk_add_parallel(keys, workers));
    }

    /// [`Filter::bulk_add_parallel`] with a layout override.
    #[cfg(feature = "std")]
    pub fn bulk_add_parallel_with(
        &self,
        keys: &[u64],
        layout: Layout,
        workers: usize,
    ) -> Result<(), LayoutError> {
        with_core!(self, core => core.bulk_add_parallel_with(keys, layout, workers))
    }

    /// Tests a batch with `workers` threads.
    #[cfg(feature = "std")]
    #[must_use]
    pub fn bulk_contains_parallel(&self, keys: &[u64], workers: usize) -> Vec<bool> {
        with_core!(self, core => core.bulk_contains_parallel(keys, workers))
    }

    /// [`Filter::bulk_contains_parallel`] with a layout override.
    #[cfg(feature = "std")]
    pub fn bulk_contains_parallel_with(
        &self,
        keys: &[u64],
        layout: Layout,
        workers: usize,
    ) -> Result<Vec<bool>, LayoutError> {
        with_core!(self, core => core.bulk_contains_parallel_with(keys, layout, workers))
    }

    /// [`Filter::bulk_contains_parallel`] into a caller-provided buffer.
    #[cfg(feature = "std")]
    pub fn bulk_contains_parallel_into(
        &self,
        keys: &[u64],
        layout: Layout,
        workers: usize,
        out: &mut [bool],
    ) -> Result<(), LayoutError> {
        with_core!(self, core => core.bulk_contains_parallel_into(keys, layout, workers, out))
    }

    /// Number of set bits.
    #[must_use]
    pub fn popcount(&self) -> u64 {
        with_core!(self, core => core.popcount())
    }

    /// Fraction of set bits relative to the effective capacity.
    #[must_use]
    pub fn fill_ratio(&self) -> f64 {
        with_core!(self, core => core.fill_ratio())
    }

    /// The bit array as little-endian bytes.
    #[must_use]
    pub fn snapshot_le(&self) -> Vec<u8> {
        with_core!(self, core => core.snapshot_le())
    }
}

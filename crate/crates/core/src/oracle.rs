//! Scalar reference implementation used to validate the bulk engine.
//!
//! The oracle shares the hashing scheme and storage with the engine — the
//! point is to validate the *execution strategy*, not to re-derive the
//! mathematics — but applies each key's pattern one bit at a time in pattern
//! order, with no strips, no layouts, no mask combining, and no concurrency.
//! Any execution schedule of the engine must produce bit-identical storage
//! and answers.

use crate::config::FilterConfig;
use crate::filter::{Filter, FilterCore, FilterError};
use crate::keys::UniqueKeys;
use crate::pattern::{make_pattern, KeyPattern};
use crate::storage::FilterWord;

fn oracle_add_core<W: FilterWord>(core: &FilterCore<W>, key: u64) {
    let h = core.hash_key(key);
    let cells = core.cells();
    let s = core.geometry().words_per_block as usize;
    match make_pattern::<W>(h, core.config(), core.geometry(), core.salts()) {
        KeyPattern::Global { positions } => {
            for pos in positions {
                let word = (pos >> W::BITS_LOG2) as usize;
                W::atomic_or(&cells[word], W::bit(pos as u32 & (W::BITS - 1)));
            }
        }
        KeyPattern::Blocked { block, masks, .. } => {
            let base = (block * s as u64) as usize;
            for (w, mask) in masks.into_iter().enumerate() {
                for bit in (0..W::BITS).filter(|&bit| mask.contains_all(W::bit(bit))) {
                    W::atomic_or(&cells[base + w], W::bit(bit));
                }
            }
        }
    }
}

fn oracle_contains_core<W: FilterWord>(core: &FilterCore<W>, key: u64) -> bool {
    let h = core.hash_key(key);
    let cells = core.cells();
    let s = core.geometry().words_per_block as usize;
    match make_pattern::<W>(h, core.config(), core.geometry(), core.salts()) {
        KeyPattern::Global { positions } => positions.into_iter().all(|pos| {
            let word = (pos >> W::BITS_LOG2) as usize;
            W::atomic_load(&cells[word]).contains_all(W::bit(pos as u32 & (W::BITS - 1)))
        }),
        KeyPattern::Blocked { block, masks, .. } => {
            let base = (block * s as u64) as usize;
            masks.into_iter().enumerate().all(|(w, mask)| {
                (0..W::BITS)
                    .filter(|&bit| mask.contains_all(W::bit(bit)))
                    .all(|bit| W::atomic_load(&cells[base + w]).contains_all(W::bit(bit)))
            })
        }
    }
}

/// Inserts `key` through the scalar reference path (one bit per store).
pub fn oracle_add(filter: &Filter, key: u64) {
    match filter {
        Filter::W32(core) => oracle_add_core(core, key),
        Filter::W64(core) => oracle_add_core(core, key),
    }
}

/// Tests `key` through the scalar reference path (one bit per probe).
#[must_use]
pub fn oracle_contains(filter: &Filter, key: u64) -> bool {
    match filter {
        Filter::W32(core) => oracle_contains_core(core, key),
        Filter::W64(core) => oracle_contains_core(core, key),
    }
}

/// Outcome of a reference false-positive measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleFpr {
    /// Keys inserted.
    pub inserted: u64,
    /// Disjoint keys probed.
    pub queried: u64,
    /// Probes answered `true` (all of them false positives by construction).
    pub positives: u64,
    /// `positives / queried`.
    pub rate: f64,
    /// Fill ratio after the insertions.
    pub fill_ratio: f64,
}

/// Measures the false-positive rate of `config` through the scalar path:
/// inserts keys `0..inserts` of the seeded stream, probes the next
/// `queries` keys (disjoint by construction), and reports the positive
/// fraction.
pub fn oracle_fpr(
    config: FilterConfig,
    inserts: u64,
    queries: u64,
    key_seed: u64,
) -> Result<OracleFpr, FilterError> {
    let filter = Filter::new(config)?;
    let stream = UniqueKeys::new(key_seed);
    for i in 0..inserts {
        oracle_add(&filter, stream.get(i));
    }
    let mut positives = 0u64;
    for i in 0..queries {
        if oracle_contains(&filter, stream.get(inserts + i)) {
            positives += 1;
        }
    }
    Ok(OracleFpr {
        inserted: inserts,
        queried: queries,
        positives,
        rate: if queries == 0 {
            0.0
        } else {
            positives as f64 / queries as f64
        },
        fill_ratio: filter.fill_ratio(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_and_engine_agree_on_a_small_filter() {
        let config = FilterConfig::sectorized(1 << 14, 256, 64, 8, 13);
        let via_oracle = Filter::new(config).unwrap();
        let via_engine = Filter::new(config).unwrap();
        let keys = UniqueKeys::new(3).collect(0, 2000);
        for &key in &keys {
            oracle_add(&via_oracle, key);
        }
        via_engine.bulk_add(&keys);
        assert_eq!(via_oracle.snapshot_le(), via_engine.snapshot_le());
        let probes = UniqueKeys::new(3).collect(2000, 2000);
        for &key in &probes {
            assert_eq!(
                oracle_contains(&via_oracle, key),
                via_engine.contains(key)
            );
        }
    }

    #[test]
    fn oracle_never_forgets_its_own_keys() {
        let config = FilterConfig::cache_sectorized(1 << 14, 512, 32, 12, 4, 13);
        let filter = Filter::new(config).unwrap();
        let keys = UniqueKeys::new(5).collect(0, 1000);
        for &key in &keys {
            oracle_add(&filter, key);
        }
        assert!(keys.iter().all(|&key| oracle_contains(&filter, key)));
    }

    #[test]
    fn fpr_measurement_reports_consistent_counts() {
        let config = FilterConfig::classical(1 << 16, 8, 13);
        let report = oracle_fpr(config, 4000, 10_000, 77).unwrap();
        assert_eq!(report.inserted, 4000);
        assert_eq!(report.queried, 10_000);
        assert!(report.rate >= 0.0 && report.rate < 0.05);
        assert!(report.fill_ratio > 0.0 && report.fill_ratio < 1.0);
        assert_eq!(report.rate, report.positives as f64 / 10_000.0);
    }
}

//! Bit-for-bit equivalence between the bulk engine and the scalar reference
//! path, across every variant, both word widths, a spread of block shapes,
//! and every admissible execution layout.
//!
//! The reference path applies one probe bit per store/load with no strips,
//! no mask combining, and no concurrency. Whatever schedule the engine runs
//! under — any layout, any worker count, any mix of entry points — it must
//! produce exactly the reference bit array and exactly the reference answers.

use bloomkit::oracle::{oracle_add, oracle_contains, oracle_fpr};
use bloomkit::{Filter, FilterConfig, Layout, UniqueKeys};

const INSERTS: usize = 4000;
const PROBES: usize = 4000;

/// One configuration per interesting corner: each variant, both word widths,
/// single-word and many-word blocks, non-power-of-two requested sizes, a
/// one-bit-per-group selector, and a one-word-per-group selector.
fn matrix() -> Vec<FilterConfig> {
    let mut classical_w32 = FilterConfig::classical(1 << 18, 11, 115);
    classical_w32.word_bits = 32;
    classical_w32.block_bits = 32;
    vec![
        FilterConfig::classical(1 << 18, 16, 101),
        FilterConfig::classical((1 << 18) - 517, 7, 102),
        classical_w32,
        FilterConfig::blocked(1 << 18, 512, 64, 12, 103),
        FilterConfig::blocked(1 << 18, 4096, 64, 16, 104),
        FilterConfig::blocked((1 << 18) + 33, 256, 32, 9, 105),
        FilterConfig::register_blocked(1 << 18, 64, 5, 106),
        FilterConfig::register_blocked(1 << 18, 32, 4, 107),
        FilterConfig::sectorized(1 << 18, 256, 64, 8, 108),
        FilterConfig::sectorized(1 << 18, 2048, 64, 32, 109),
        FilterConfig::sectorized(1 << 18, 512, 32, 16, 110),
        FilterConfig::cache_sectorized(1 << 18, 1024, 64, 16, 4, 111),
        FilterConfig::cache_sectorized(1 << 18, 4096, 64, 8, 8, 112),
        FilterConfig::cache_sectorized(1 << 18, 512, 64, 8, 8, 113),
        FilterConfig::cache_sectorized(1 << 18, 1024, 32, 16, 2, 114),
    ]
}

/// Builds the reference filter by scalar insertion and returns its bit array
/// together with its answers for `probes`.
fn reference_state(
    config: FilterConfig,
    keys: &[u64],
    probes: &[u64],
) -> (Vec<u8>, Vec<bool>) {
    let filter = Filter::new(config).unwrap();
    for &key in keys {
        oracle_add(&filter, key);
    }
    for &key in keys {
        assert!(
            oracle_contains(&filter, key),
            "reference path lost key {key:#x} under {:?}",
            config.variant
        );
    }
    let answers = probes
        .iter()
        .map(|&key| oracle_contains(&filter, key))
        .collect();
    (filter.snapshot_le(), answers)
}

#[test]
fn every_layout_reproduces_the_reference_bits_and_answers() {
    for config in matrix() {
        let geometry = config.geometry().unwrap();
        let stream = UniqueKeys::new(config.seed);
        let keys = stream.collect(0, INSERTS);
        let probes = stream.collect(INSERTS as u64, PROBES);
        let (want_bits, want_answers) = reference_state(config, &keys, &probes);

        for layout in Layout::enumerate(geometry.words_per_block) {
            let engine = Filter::new(config.with_layout(layout)).unwrap();
            engine.bulk_add(&keys);
            assert_eq!(
                engine.snapshot_le(),
                want_bits,
                "bit array diverged: {:?} layout {layout}",
                config.variant
            );
            assert_eq!(
                engine.bulk_contains(&probes),
                want_answers,
                "bulk answers diverged: {:?} layout {layout}",
                config.variant
            );
            // The single-key path answers identically as well.
            for (&key, &want) in probes.iter().take(500).zip(&want_answers) {
                assert_eq!(
                    engine.contains(key),
                    want,
                    "scalar answer diverged: {:?} layout {layout} key {key:#x}",
                    config.variant
                );
            }
        }
    }
}

#[test]
fn eight_workers_reproduce_the_reference_bits_and_answers() {
    for config in matrix() {
        let geometry = config.geometry().unwrap();
        let stream = UniqueKeys::new(config.seed ^ 0xA5A5);
        let keys = stream.collect(0, 10_000);
        let probes = stream.collect(10_000, PROBES);
        let (want_bits, want_answers) = reference_state(config, &keys, &probes);

        let lookup = Layout::lookup_default(geometry.words_per_block);
        let engine = Filter::new(config.with_layout(lookup)).unwrap();
        engine.bulk_add_parallel(&keys, 8);
        assert_eq!(
            engine.snapshot_le(),
            want_bits,
            "concurrent insertion diverged under {:?}",
            config.variant
        );
        assert_eq!(
            engine.bulk_contains_parallel(&probes, 8),
            want_answers,
            "concurrent lookup diverged under {:?}",
            config.variant
        );
    }
}

#[test]
fn mixed_ingestion_paths_reproduce_the_reference_bits() {
    for config in matrix() {
        let stream = UniqueKeys::new(config.seed ^ 0x5A5A);
        let keys = stream.collect(0, 3000);
        let probes = stream.collect(3000, 1000);
        let (want_bits, want_answers) = reference_state(config, &keys, &probes);

        // One third scalar, one third bulk, one third across four workers:
        // insertion order and entry point never matter.
        let engine = Filter::new(config).unwrap();
        for &key in &keys[2000..] {
            engine.add(key);
        }
        engine.bulk_add(&keys[1000..2000]);
        engine.bulk_add_parallel(&keys[..1000], 4);
        assert_eq!(
            engine.snapshot_le(),
            want_bits,
            "mixed ingestion diverged under {:?}",
            config.variant
        );
        assert_eq!(engine.bulk_contains(&probes), want_answers);
    }
}

#[test]
fn fpr_probe_counts_match_the_bulk_engine() {
    for config in [
        FilterConfig::blocked(1 << 16, 512, 64, 8, 21),
        FilterConfig::cache_sectorized(1 << 16, 1024, 64, 16, 4, 22),
    ] {
        let report = oracle_fpr(config, 3000, 20_000, 99).unwrap();
        assert_eq!(report.inserted, 3000);
        assert_eq!(report.queried, 20_000);

        let filter = Filter::new(config).unwrap();
        let stream = UniqueKeys::new(99);
        filter.bulk_add(&stream.collect(0, 3000));
        let probes = stream.collect(3000, 20_000);
        let positives = filter.bulk_contains(&probes).iter().filter(|&&hit| hit).count();
        assert_eq!(report.positives, positives as u64);
        assert_eq!(report.fill_ratio, filter.fill_ratio());
    }
}

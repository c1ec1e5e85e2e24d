//! Property-based invariants over randomly drawn valid configurations:
//! inserted keys are always found, the execution layout never changes the
//! stored bits or the answers, and serialization round-trips exactly.

use bloomkit::codec;
use bloomkit::oracle::oracle_add;
use bloomkit::{Filter, FilterConfig, Layout, UniqueKeys};
use proptest::prelude::*;

/// Draws a valid configuration of any variant: requested sizes need not be
/// powers of two, both word widths appear, and the divisibility constraints
/// of the sectorized variants are satisfied by construction.
fn arb_config() -> impl Strategy<Value = FilterConfig> {
    (1_000u64..300_000, any::<u64>(), prop_oneof![Just(32u32), Just(64u32)]).prop_flat_map(
        |(m, seed, word_bits)| {
            let word = u64::from(word_bits);
            prop_oneof![
                (1u32..=12).prop_map(move |k| {
                    let mut config = FilterConfig::classical(m, k, seed);
                    config.word_bits = word_bits;
                    config.block_bits = word;
                    config
                }),
                (0u32..=4, 1u32..=12).prop_map(move |(e, k)| {
                    FilterConfig::blocked(m, word << e, word_bits, k, seed)
                }),
                (1u32..=8).prop_map(move |k| {
                    FilterConfig::register_blocked(m, word_bits, k, seed)
                }),
                // k = j bits per word, s = 2^e words per block.
                (0u32..=4, 1u32..=3).prop_map(move |(e, j)| {
                    FilterConfig::sectorized(m, word << e, word_bits, j << e, seed)
                }),
                // z = 2^g groups over s = 2^e words, k = j bits per group.
                (1u32..=4)
                    .prop_flat_map(|e| (Just(e), 0..=e, 1u32..=3))
                    .prop_map(move |(e, g, j)| {
                        FilterConfig::cache_sectorized(m, word << e, word_bits, j << g, 1 << g, seed)
                    }),
            ]
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn inserted_keys_are_always_found(
        config in arb_config(),
        key_seed in any::<u64>(),
        n in 1usize..1500,
    ) {
        let filter = Filter::new(config).unwrap();
        let keys = UniqueKeys::new(key_seed).collect(0, n);
        filter.bulk_add(&keys);
        prop_assert!(keys.iter().all(|&key| filter.contains(key)));
        prop_assert!(filter.bulk_contains(&keys).iter().all(|&hit| hit));
    }

    #[test]
    fn bulk_engine_matches_scalar_reference(
        config in arb_config(),
        key_seed in any::<u64>(),
        n in 1usize..800,
    ) {
        let engine = Filter::new(config).unwrap();
        let reference = Filter::new(config).unwrap();
        let keys = UniqueKeys::new(key_seed).collect(0, n);
        engine.bulk_add(&keys);
        for &key in &keys {
            oracle_add(&reference, key);
        }
        prop_assert_eq!(engine.snapshot_le(), reference.snapshot_le());
    }

    #[test]
    fn layout_choice_never_changes_bits_or_answers(
        config in arb_config(),
        key_seed in any::<u64>(),
        picks in any::<(usize, usize)>(),
        n in 1usize..1000,
    ) {
        let geometry = config.geometry().unwrap();
        let layouts = Layout::enumerate(geometry.words_per_block);
        let first = layouts[picks.0 % layouts.len()];
        let second = layouts[picks.1 % layouts.len()];

        let stream = UniqueKeys::new(key_seed);
        let keys = stream.collect(0, n);
        let probes = stream.collect(n as u64, 400);

        let a = Filter::new(config.with_layout(first)).unwrap();
        let b = Filter::new(config.with_layout(second)).unwrap();
        a.bulk_add(&keys);
        b.bulk_add(&keys);
        prop_assert_eq!(a.snapshot_le(), b.snapshot_le());
        prop_assert_eq!(a.bulk_contains(&probes), b.bulk_contains(&probes));
    }

    #[test]
    fn serialized_filters_roundtrip_exactly(
        config in arb_config(),
        key_seed in any::<u64>(),
        n in 0usize..1200,
    ) {
        let geometry = config.geometry().unwrap();
        let filter = Filter::new(config).unwrap();
        let keys = UniqueKeys::new(key_seed).collect(0, n);
        filter.bulk_add(&keys);

        let bytes = codec::serialize(&filter);
        let restored = codec::deserialize(&bytes).unwrap();
        prop_assert_eq!(restored.snapshot_le(), filter.snapshot_le());

        // Everything round-trips except the execution layout, which is not
        // part of the stored form; decoded filters start at the lookup
        // default for their shape.
        let mut want = config;
        want.layout = Layout::lookup_default(geometry.words_per_block);
        prop_assert_eq!(*restored.config(), want);

        let probes = UniqueKeys::new(!key_seed).collect(0, 400);
        prop_assert_eq!(restored.bulk_contains(&probes), filter.bulk_contains(&probes));
    }

    #[test]
    fn u64_keys_and_their_le_bytes_are_the_same_key(
        config in arb_config(),
        key in any::<u64>(),
    ) {
        let filter = Filter::new(config).unwrap();
        filter.add_bytes(&key.to_le_bytes());
        prop_assert!(filter.contains(key));
    }
}

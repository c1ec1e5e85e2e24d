//! In-process correctness battery: layout algebra, engine-vs-reference
//! equivalence over randomized configurations, serialization round-trips,
//! and sizing-math spot checks. One `ok`/`FAILED` line per check.

use std::io::{self, Write};

use bloomkit::oracle::{oracle_add, oracle_contains};
use bloomkit::{codec, Filter, FilterConfig, Layout, SplitMix64, UniqueKeys, Variant};

/// Deterministically samples `count` valid configurations spanning all five
/// variants: blocks from 64 to 1024 bits, 32- and 64-bit words, probe counts
/// and group counts satisfying each variant's divisibility rules, and
/// requested sizes that are usually not whole multiples of the block.
pub fn sample_configs(seed: u64, count: usize) -> Vec<FilterConfig> {
    let mut rng = SplitMix64::new(seed);
    let mut configs = Vec::with_capacity(count);
    for index in 0..count {
        fn pick(rng: &mut SplitMix64, bound: u64) -> u64 {
            rng.next_u64() % bound
        }
        // Round-robin over variants so every one appears count/5 times.
        let variant = Variant::ALL[index % Variant::ALL.len()];
        let word_bits: u32 = if pick(&mut rng, 2) == 0 { 32 } else { 64 };
        let m_bits = (1 << 19) + pick(&mut rng, 1 << 20);
        let seed = rng.next_u64();
        // Block size: a power of two in [word_bits, 1024].
        let max_exp = 10 - u64::from(word_bits).trailing_zeros();
        let block_bits = u64::from(word_bits) << pick(&mut rng, u64::from(max_exp) + 1);
        let config = match variant {
            Variant::Classical => {
                let k = 1 + pick(&mut rng, 20) as u32;
                let mut config = FilterConfig::classical(m_bits, k, seed);
                config.word_bits = word_bits;
                config.block_bits = u64::from(word_bits);
                config
            }
            Variant::Blocked => {
                let k = 1 + pick(&mut rng, 20) as u32;
                FilterConfig::blocked(m_bits, block_bits, word_bits, k, seed)
            }
            Variant::RegisterBlocked => {
                let k = 1 + pick(&mut rng, 16) as u32;
                FilterConfig::register_blocked(m_bits, word_bits, k, seed)
            }
            Variant::Sectorized => {
                let s = (block_bits / u64::from(word_bits)) as u32;
                let k = s * (1 + pick(&mut rng, 3) as u32);
                FilterConfig::sectorized(m_bits, block_bits, word_bits, k, seed)
            }
            Variant::CacheSectorized => {
                let s = (block_bits / u64::from(word_bits)) as u32;
                let z = 1 << pick(&mut rng, u64::from(s.trailing_zeros()) + 1);
                let k = z * (1 + pick(&mut rng, 3) as u32);
                FilterConfig::cache_sectorized(m_bits, block_bits, word_bits, k, z, seed)
            }
        };
        config
            .geometry()
            .expect("sampler draws only valid configurations");
        configs.push(config);
    }
    configs
}

fn expected_layouts_s8() -> Vec<(u32, u32)> {
    vec![
        (1, 1),
        (1, 2),
        (1, 4),
        (1, 8),
        (2, 1),
        (2, 2),
        (2, 4),
        (4, 1),
        (4, 2),
        (8, 1),
    ]
}

fn check_layout_enumeration() -> Result<(), String> {
    let got: Vec<(u32, u32)> = Layout::enumerate(8)
        .into_iter()
        .map(|layout| (layout.theta(), layout.phi()))
        .collect();
    if got != expected_layouts_s8() {
        return Err(format!("enumerate(8) returned {got:?}"));
    }
    if Layout::enumerate(1).len() != 1 || Layout::enumerate(4).len() != 6 {
        return Err("enumeration counts for s=1 / s=4 are wrong".into());
    }
    Ok(())
}

fn check_layout_partition() -> Result<(), String> {
    for exp in 0..=6u32 {
        let s = 1u32 << exp;
        for layout in Layout::enumerate(s) {
            let mut seen = vec![false; s as usize];
            for step in 0..layout.steps(s) {
                for lane in 0..layout.theta() {
                    let words = layout
                        .word_assignment(lane, step, s)
                        .map_err(|err| err.to_string())?;
                    for word in words {
                        if seen[word as usize] {
                            return Err(format!("{layout} visits word {word} twice at s={s}"));
                        }
                        seen[word as usize] = true;
                    }
                }
            }
            if !seen.iter().all(|&v| v) {
                return Err(format!("{layout} does not cover every word at s={s}"));
            }
        }
    }
    Ok(())
}

fn check_schedule_orders() -> Result<(), String> {
    // (theta, phi, lane, step) -> expected word range, on 8-word blocks.
    let cases = [
        (1u32, 8u32, 0u32, 0u32, 0u32..8u32),
        (1, 1, 0, 5, 5..6),
        (2, 2, 1, 0, 2..4),
        (2, 2, 0, 1, 4..6),
        (2, 4, 1, 0, 4..8),
        (4, 2, 3, 0, 6..8),
    ];
    for (theta, phi, lane, step, want) in cases {
        let layout = Layout::new(theta, phi).map_err(|err| err.to_string())?;
        let got = layout
            .word_assignment(lane, step, 8)
            .map_err(|err| err.to_string())?;
        if got != want {
            return Err(format!(
                "({theta},{phi}) lane {lane} step {step}: got {got:?}, want {want:?}"
            ));
        }
    }
    Ok(())
}

fn check_no_false_negatives(configs: &[FilterConfig]) -> Result<(), String> {
    for config in configs {
        let filter = Filter::new(*config).map_err(|err| err.to_string())?;
        let keys = UniqueKeys::new(config.seed ^ 0xBEEF).collect(0, 2500);
        filter.bulk_add(&keys);
        if let Some(&key) = keys.iter().find(|&&key| !filter.contains(key)) {
            return Err(format!(
                "key {key:#x} lost under {}",
                crate::report::describe_config(config)
            ));
        }
    }
    Ok(())
}

fn check_engine_equals_reference(configs: &[FilterConfig]) -> Result<(), String> {
    for config in configs {
        let geometry = config.geometry().map_err(|err| err.to_string())?;
        let stream = UniqueKeys::new(config.seed);
        let keys = stream.collect(0, 1500);
        let probes = stream.collect(1500, 800);

        let reference = Filter::new(*config).map_err(|err| err.to_string())?;
        for &key in &keys {
            oracle_add(&reference, key);
        }
        let want_bits = reference.snapshot_le();
        let want_answers: Vec<bool> = probes
            .iter()
            .map(|&key| oracle_contains(&reference, key))
            .collect();

        for layout in Layout::enumerate(geometry.words_per_block) {
            let engine = Filter::new(config.with_layout(layout)).map_err(|err| err.to_string())?;
            engine.bulk_add(&keys);
            if engine.snapshot_le() != want_bits {
                return Err(format!(
                    "bit array diverged under {} layout {layout}",
                    crate::report::describe_config(config)
                ));
            }
            if engine.bulk_contains(&probes) != want_answers {
                return Err(format!(
                    "answers diverged under {} layout {layout}",
                    crate::report::describe_config(config)
                ));
            }
        }

        let concurrent = Filter::new(*config).map_err(|err| err.to_string())?;
        concurrent.bulk_add_parallel(&keys, 4);
        if concurrent.snapshot_le() != want_bits {
            return Err(format!(
                "4-worker insertion diverged under {}",
                crate::report::describe_config(config)
            ));
        }
    }
    Ok(())
}

fn check_codec_roundtrip(configs: &[FilterConfig]) -> Result<(), String> {
    for config in configs.iter().take(10) {
        let filter = Filter::new(*config).map_err(|err| err.to_string())?;
        let keys = UniqueKeys::new(!config.seed).collect(0, 1000);
        filter.bulk_add(&keys);
        let restored = codec::deserialize(&codec::serialize(&filter))
            .map_err(|err| err.to_string())?;
        if restored.snapshot_le() != filter.snapshot_le() {
            return Err(format!(
                "round trip changed the bit array for {}",
                crate::report::describe_config(config)
            ));
        }
        if !keys.iter().all(|&key| restored.contains(key)) {
            return Err("round trip lost keys".into());
        }
    }
    Ok(())
}

fn check_sizing_math() -> Result<(), String> {
    let (k_real, k) = bloomkit::analytics::optimal_k(10.0).map_err(|err| err.to_string())?;
    if k != 7 || (k_real - 6.931).abs() > 0.001 {
        return Err(format!("optimal_k(10) gave ({k_real}, {k})"));
    }
    let floor = bloomkit::analytics::min_fpr(10.0).map_err(|err| err.to_string())?;
    if (floor - 8.1926e-3).abs() / 8.1926e-3 > 1e-3 {
        return Err(format!("min_fpr(10) gave {floor}"));
    }
    Ok(())
}

/// Runs the battery, writing one line per check to `out`. Returns `true`
/// when every check passed.
pub fn run(out: &mut dyn Write) -> io::Result<bool> {
    let configs = sample_configs(0x5E1F_7E57, 40);
    let checks: Vec<(&str, Result<(), String>)> = vec![
        ("layout enumeration", check_layout_enumeration()),
        ("layout partition", check_layout_partition()),
        ("schedule word orders", check_schedule_orders()),
        ("no false negatives", check_no_false_negatives(&configs)),
        ("engine equals reference", check_engine_equals_reference(&configs)),
        ("serialization round trip", check_codec_roundtrip(&configs)),
        ("sizing mathematics", check_sizing_math()),
    ];
    let mut passed = 0;
    for (name, outcome) in &checks {
        match outcome {
            Ok(()) => {
                passed += 1;
                writeln!(out, "ok - {name}")?;
            }
            Err(detail) => writeln!(out, "FAILED - {name}: {detail}")?,
        }
    }
    writeln!(out, "selftest: {passed}/{} checks passed", checks.len())?;
    Ok(passed == checks.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampler_spans_all_variants_and_both_word_widths() {
        let configs = sample_configs(1, 200);
        assert_eq!(configs.len(), 200);
        for variant in Variant::ALL {
            assert!(configs.iter().any(|c| c.variant == variant));
        }
        assert!(configs.iter().any(|c| c.word_bits == 32));
        assert!(configs.iter().any(|c| c.word_bits == 64));
        assert!(configs.iter().all(|c| c.geometry().is_ok()));
        assert!(configs.iter().all(|c| c.block_bits <= 1024));
        // Deterministic: same seed, same draw.
        assert_eq!(sample_configs(1, 200), configs);
        assert_ne!(sample_configs(2, 200), configs);
    }

    #[test]
    fn battery_passes_and_reports_every_check() {
        let mut out = Vec::new();
        assert!(run(&mut out).unwrap());
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("ok - ")).count(), 7);
        assert!(text.contains("7/7 checks passed"));
    }
}

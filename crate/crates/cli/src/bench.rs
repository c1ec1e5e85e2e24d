//! Measurement harness: throughput timing for bulk add/contains, empirical
//! false-positive rates, layout grid search, frontier sweeps, and the host's
//! random-access baseline.
//!
//! Protocol, applied uniformly: key generation, allocation, population, and
//! correctness verification all happen outside the timed region; every
//! measurement first asserts correctness (no false negatives, and that the
//! measured layout answers exactly like the scalar schedule) on a subsample;
//! then one untimed warm-up pass runs, followed by timed repetitions until
//! the relative standard error of the per-repetition throughputs falls below
//! the configured threshold or a repetition cap is reached.

use std::fmt;
use std::io::Write;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use bloomkit::analytics::{fpr_estimate, optimal_n};
use bloomkit::{Filter, FilterConfig, FilterError, Layout, UniqueKeys, Variant};

use crate::report::{BenchReport, Op};

/// Keys per chunk when streaming large insert/query workloads.
const CHUNK: usize = 1 << 22;

/// Subsample size for the pre-timing correctness checks.
const VERIFY_SAMPLE: usize = 4096;

/// A harness failure.
#[derive(Debug)]
pub enum BenchError {
    /// Building the filter failed; allocation failures are distinguished
    /// from configuration errors by the inner value.
    Build(FilterError),
    /// The key set is empty.
    EmptyKeys,
    /// Invalid measurement options (caps, thresholds).
    BadOptions(String),
    /// The measurement never stabilized: the relative standard error stayed
    /// at or above the threshold through the repetition cap.
    TimingUnstable {
        /// Achieved relative standard error.
        achieved: f64,
        /// Configured stop threshold.
        threshold: f64,
        /// Repetitions executed.
        repetitions: u32,
    },
    /// The pre-timing correctness check failed (this indicates a bug, not a
    /// measurement problem).
    Correctness(String),
}

impl fmt::Display for BenchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchError::Build(err) => write!(f, "{err}"),
            BenchError::EmptyKeys => write!(f, "the key set is empty; nothing to measure"),
            BenchError::BadOptions(msg) => write!(f, "invalid measurement options: {msg}"),
            BenchError::TimingUnstable {
                achieved,
                threshold,
                repetitions,
            } => write!(
                f,
                "timing did not stabilize: relative standard error {:.2}% after {repetitions} \
                 repetitions (threshold {:.2}%); re-run on an idle machine or raise the cap",
                achieved * 100.0,
                threshold * 100.0
            ),
            BenchError::Correctness(msg) => write!(f, "correctness check failed: {msg}"),
        }
    }
}

impl std::error::Error for BenchError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            BenchError::Build(err) => Some(err),
            _ => None,
        }
    }
}

impl From<FilterError> for BenchError {
    fn from(err: FilterError) -> Self {
        BenchError::Build(err)
    }
}

impl BenchError {
    /// Whether this failure is the caller's input (usage) rather than a
    /// runtime condition.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            BenchError::Build(FilterError::Config(_) | FilterError::WordWidthMismatch { .. })
                | BenchError::EmptyKeys
                | BenchError::BadOptions(_)
        )
    }
}

/// Knobs for a throughput measurement.
#[derive(Clone, Copy, Debug)]
pub struct ThroughputOptions {
    /// Keys per repetition.
    pub keys: u64,
    /// Worker threads handed to the bulk calls.
    pub workers: usize,
    /// Layout override; `None` selects the op's default for the block shape.
    pub layout: Option<Layout>,
    /// Seed of the unique-key stream.
    pub key_seed: u64,
    /// Maximum timed repetitions (at least 2).
    pub reps_cap: u32,
    /// Stop once the relative standard error falls below this.
    pub stderr_threshold: f64,
    /// Random-access baseline (updates/second) for the sol-fraction column.
    pub baseline: Option<f64>,
}

impl Default for ThroughputOptions {
    fn default() -> Self {
        ThroughputOptions {
            keys: 10_000_000,
            workers: 1,
            layout: None,
            key_seed: 42,
            reps_cap: 9,
            stderr_threshold: 0.02,
            baseline: None,
        }
    }
}

impl ThroughputOptions {
    fn validate(&self) -> Result<(), BenchError> {
        if self.keys == 0 {
            return Err(BenchError::EmptyKeys);
        }
        if self.reps_cap < 2 {
            return Err(BenchError::BadOptions(
                "repetition cap must be at least 2".into(),
            ));
        }
        if self.stderr_threshold.is_nan() || self.stderr_threshold <= 0.0 {
            return Err(BenchError::BadOptions(
                "stderr threshold must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Relative standard error of the mean over `samples` (needs two or more).
fn rel_stderr(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt() / mean
}

/// The op's default layout for a block of `words_per_block` words.
fn default_layout(op: Op, words_per_block: u32) -> Layout {
    match op {
        Op::Add => Layout::insert_default(),
        Op::Contains => Layout::lookup_default(words_per_block),
    }
}

/// Asserts, on a subsample, that every populated key is found and that the
/// measured layout answers exactly like the scalar schedule.
fn verify_subsample(filter: &Filter, keys: &[u64], layout: Layout) -> Result<(), BenchError> {
    let sample = &keys[..keys.len().min(VERIFY_SAMPLE)];
    let under_layout = filter
        .bulk_contains_with(sample, layout)
        .map_err(|err| BenchError::Correctness(err.to_string()))?;
    if let Some(position) = under_layout.iter().position(|&hit| !hit) {
        return Err(BenchError::Correctness(format!(
            "populated key {:#x} not found",
            sample[position]
        )));
    }
    let scalar = filter
        .bulk_contains_with(sample, Layout::SCALAR)
        .map_err(|err| BenchError::Correctness(err.to_string()))?;
    if under_layout != scalar {
        return Err(BenchError::Correctness(format!(
            "layout {layout} disagrees with the scalar schedule on a subsample"
        )));
    }
    Ok(())
}

/// Timed repetitions of `op` over `keys` on an already-populated filter.
/// Returns `(elapsed_seconds_total, repetitions, relative_stderr)`.
fn timed_reps(
    filter: &Filter,
    keys: &[u64],
    op: Op,
    layout: Layout,
    workers: usize,
    opts: &ThroughputOptions,
) -> Result<(f64, u32, f64), BenchError> {
    let mut results = vec![false; if op == Op::Contains { keys.len() } else { 0 }];

    let mut run = |timed: bool| -> Result<f64, BenchError> {
        let started = Instant::now();
        match op {
            Op::Add => filter
                .bulk_add_parallel_with(keys, layout, workers)
                .map_err(|err| BenchError::Correctness(err.to_string()))?,
            Op::Contains => filter
                .bulk_contains_parallel_into(keys, layout, workers, &mut results)
                .map_err(|err| BenchError::Correctness(err.to_string()))?,
        }
        let elapsed = started.elapsed().as_secs_f64();
        if op == Op::Contains {
            std::hint::black_box(&results);
        }
        Ok(if timed { elapsed } else { 0.0 })
    };

    run(false)?; // warm-up: populates (add) / heats caches, untimed

    let mut throughputs: Vec<f64> = Vec::new();
    let mut elapsed_total = 0.0;
    let mut achieved = f64::INFINITY;
    while (throughputs.len() as u32) < opts.reps_cap {
        let elapsed = run(true)?;
        elapsed_total += elapsed;
        throughputs.push(keys.len() as f64 / elapsed);
        if throughputs.len() >= 2 {
            achieved = rel_stderr(&throughputs);
            if achieved < opts.stderr_threshold {
                break;
            }
        }
    }
    let repetitions = throughputs.len() as u32;
    if achieved >= opts.stderr_threshold {
        return Err(BenchError::TimingUnstable {
            achieved,
            threshold: opts.stderr_threshold,
            repetitions,
        });
    }
    Ok((elapsed_total, repetitions, achieved))
}

fn finish_report(
    config: &FilterConfig,
    filter: &Filter,
    op: Op,
    layout: Layout,
    opts: &ThroughputOptions,
    timing: (f64, u32, f64),
) -> BenchReport {
    let (elapsed_s, repetitions, relative_stderr) = timing;
    let mut report = BenchReport::for_config(config, filter.geometry(), op);
    report.theta = layout.theta();
    report.phi = layout.phi();
    report.workers = opts.workers;
    report.keys = opts.keys;
    report.elapsed_s = elapsed_s;
    report.repetitions = repetitions;
    report.relative_stderr = relative_stderr;
    report.throughput_eps = opts.keys as f64 * f64::from(repetitions) / elapsed_s;
    report.fill_ratio = Some(filter.fill_ratio());
    report.sol_fraction = opts.baseline.map(|b| report.throughput_eps / b);
    report
}

/// Measures bulk `op` throughput for `config`.
///
/// For `contains` the filter is pre-populated with the very keys that are
/// queried, so every lookup is a true positive (asserted before timing).
pub fn measure_throughput(
    config: FilterConfig,
    op: Op,
    opts: &ThroughputOptions,
) -> Result<BenchReport, BenchError> {
    opts.validate()?;
    let geometry = config.geometry().map_err(FilterError::Config)?;
    let layout = opts.layout.unwrap_or(default_layout(op, geometry.words_per_block));
    // Reject an unusable layout override before allocating anything.
    config
        .with_layout(layout)
        .geometry()
        .map_err(FilterError::Config)?;

    let keys = UniqueKeys::new(opts.key_seed).collect(0, opts.keys as usize);
    let filter = Filter::new(config)?;
    if op == Op::Contains {
        filter.bulk_add_parallel(&keys, opts.workers);
    } else {
        // Populate the subsample so the no-false-negative check below has
        // something to find; the warm-up pass inserts the full set.
        filter.bulk_add(&keys[..keys.len().min(VERIFY_SAMPLE)]);
    }
    verify_subsample(&filter, &keys, layout)?;

    let timing = timed_reps(&filter, &keys, op, layout, opts.workers, opts)?;
    Ok(finish_report(&config, &filter, op, layout, opts, timing))
}

/// Outcome of an empirical false-positive measurement.
#[derive(Clone, Copy, Debug)]
pub struct FprReport {
    /// Keys inserted (the optimal load for the filter's size and `k`).
    pub inserted: u64,
    /// Disjoint keys queried.
    pub queried: u64,
    /// Queries answered `true` — all false positives by construction.
    pub positives: u64,
    /// `positives / queried`.
    pub rate: f64,
    /// Fill ratio after population.
    pub fill_ratio: f64,
    /// The analytic rate for the same size, load, and `k`.
    pub predicted: f64,
}

/// Measures the empirical false-positive rate of `config`: inserts the
/// optimal key count for its effective size, then queries `queries` keys
/// drawn from the same stream beyond the inserted range (disjoint by
/// construction).
pub fn measure_fpr(
    config: FilterConfig,
    queries: u64,
    key_seed: u64,
    workers: usize,
) -> Result<FprReport, BenchError> {
    let geometry = config.geometry().map_err(FilterError::Config)?;
    let inserted = optimal_n(geometry.m_effective, config.k)
        .map_err(|err| BenchError::BadOptions(err.to_string()))?;
    let predicted = fpr_estimate(geometry.m_effective, inserted, config.k)
        .map_err(|err| BenchError::BadOptions(err.to_string()))?;

    let filter = Filter::new(config)?;
    let stream = UniqueKeys::new(key_seed);
    let mut buffer = vec![0u64; CHUNK.min(inserted.max(queries).max(1) as usize)];
    let mut done = 0u64;
    while done < inserted {
        let len = buffer.len().min((inserted - done) as usize);
        stream.fill(done, &mut buffer[..len]);
        filter.bulk_add_parallel(&buffer[..len], workers);
        done += len as u64;
    }

    let mut results = vec![false; buffer.len()];
    let mut positives = 0u64;
    let mut queried = 0u64;
    while queried < queries {
        let len = results.len().min((queries - queried) as usize);
        stream.fill(inserted + queried, &mut buffer[..len]);
        filter
            .bulk_contains_parallel_into(
                &buffer[..len],
                config.layout,
                workers,
                &mut results[..len],
            )
            .map_err(|err| BenchError::Correctness(err.to_string()))?;
        positives += results[..len].iter().filter(|&&hit| hit).count() as u64;
        queried += len as u64;
    }

    Ok(FprReport {
        inserted,
        queried,
        positives,
        rate: if queried == 0 {
            0.0
        } else {
            positives as f64 / queried as f64
        },
        fill_ratio: filter.fill_ratio(),
        predicted,
    })
}

/// Measures every admissible layout for `config`'s block shape and returns
/// one report per layout plus the index of the fastest.
///
/// The filter is built and populated once — the layout never changes the
/// stored bits — and each layout is verified against the scalar schedule on
/// a subsample before its timed repetitions.
pub fn layout_grid_search(
    config: FilterConfig,
    op: Op,
    opts: &ThroughputOptions,
) -> Result<(Vec<BenchReport>, usize), BenchError> {
    opts.validate()?;
    let geometry = config.geometry().map_err(FilterError::Config)?;
    let keys = UniqueKeys::new(opts.key_seed).collect(0, opts.keys as usize);
    let filter = Filter::new(config)?;
    filter.bulk_add_parallel(&keys, opts.workers);

    let mut reports = Vec::new();
    for layout in Layout::enumerate(geometry.words_per_block) {
        verify_subsample(&filter, &keys, layout)?;
        let timing = timed_reps(&filter, &keys, op, layout, opts.workers, opts)?;
        reports.push(finish_report(&config, &filter, op, layout, opts, timing));
    }
    let best = reports
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.throughput_eps.total_cmp(&b.throughput_eps))
        .map(|(index, _)| index)
        .expect("enumerate yields at least the scalar layout");
    Ok((reports, best))
}

/// Which access pattern a baseline measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineOp {
    /// Random relaxed 64-bit loads.
    Read,
    /// Random relaxed 64-bit OR-stores.
    Write,
}

/// Measures the host's random-access throughput (updates/second) over an
/// array of roughly `bytes` bytes (rounded down to a power-of-two word
/// count): the platform's speed-of-light analog for filter operations.
///
/// The array is written in full before timing so every page is resident;
/// the timed loop performs `accesses` independent random accesses (the
/// index computation is part of the measured work, as in GUPS).
pub fn random_access_baseline(bytes: u64, op: BaselineOp, accesses: u64, seed: u64) -> f64 {
    // Largest power-of-two word count that fits the requested byte budget
    // (floor of 1024 words), so the index mask is a single AND.
    let want = (bytes / 8).max(1024) as usize;
    let words = if want.is_power_of_two() {
        want
    } else {
        want.next_power_of_two() / 2
    };
    let mask = (words - 1) as u64;
    let mut array = Vec::with_capacity(words);
    array.resize_with(words, || AtomicU64::new(0));
    for (index, cell) in array.iter_mut().enumerate() {
        *cell.get_mut() = index as u64; // touch every page before timing
    }

    let run = |accesses: u64, round: u64| -> f64 {
        let started = Instant::now();
        match op {
            BaselineOp::Read => {
                let mut acc = 0u64;
                for i in 0..accesses {
                    let index = bloomkit::mix64(seed ^ (round << 56) ^ i) & mask;
                    acc ^= array[index as usize].load(Ordering::Relaxed);
                }
                std::hint::black_box(acc);
            }
            BaselineOp::Write => {
                for i in 0..accesses {
                    let h = bloomkit::mix64(seed ^ (round << 56) ^ i);
                    array[(h & mask) as usize].fetch_or(1u64 << (h >> 58), Ordering::Relaxed);
                }
            }
        }
        accesses as f64 / started.elapsed().as_secs_f64()
    };

    run(accesses.min(1 << 20), 0); // warm-up
    let reps = 3u64;
    (1..=reps).map(|round| run(accesses, round)).sum::<f64>() / reps as f64
}

/// One cell of a frontier sweep.
#[derive(Clone, Copy, Debug)]
pub struct FrontierCell {
    /// Filter variant.
    pub variant: Variant,
    /// Block size in bits.
    pub block_bits: u64,
    /// Requested filter size in bits.
    pub m_bits: u64,
    /// Word groups (cache-sectorized cells only, 0 otherwise).
    pub groups: u32,
}

/// Sweep parameters.
#[derive(Clone, Debug)]
pub struct FrontierSpec {
    /// Variants to sweep.
    pub variants: Vec<Variant>,
    /// Block sizes in bits.
    pub blocks: Vec<u64>,
    /// Filter sizes in bits.
    pub sizes: Vec<u64>,
    /// Word size in bits.
    pub word_bits: u32,
    /// Probe bits per key.
    pub k: u32,
    /// Keys per timed repetition.
    pub keys: u64,
    /// Queries for each cell's false-positive measurement.
    pub fpr_queries: u64,
    /// Worker threads.
    pub workers: usize,
    /// Seed for filters and key streams.
    pub seed: u64,
    /// Repetition cap per measurement.
    pub reps_cap: u32,
    /// Relative-stderr stop threshold.
    pub stderr_threshold: f64,
}

/// Outcome counts of a sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FrontierSummary {
    /// Cells fully measured and written.
    pub cells_written: usize,
    /// Cells skipped or failed (details on the log stream).
    pub cells_failed: usize,
}

/// Expands the sweep grid: every (size, variant, block), with
/// cache-sectorized cells additionally expanded over admissible group
/// counts z ∈ {2, 4, …, s}.
fn frontier_cells(spec: &FrontierSpec) -> Vec<FrontierCell> {
    let mut cells = Vec::new();
    for &m_bits in &spec.sizes {
        for &variant in &spec.variants {
            for &block_bits in &spec.blocks {
                match variant {
                    Variant::CacheSectorized => {
                        let s = (block_bits / u64::from(spec.word_bits)).max(1) as u32;
                        let mut z = 2;
                        while z <= s {
                            if spec.k % z == 0 {
                                cells.push(FrontierCell {
                                    variant,
                                    block_bits,
                                    m_bits,
                                    groups: z,
                                });
                            }
                            z *= 2;
                        }
                    }
                    _ => cells.push(FrontierCell {
                        variant,
                        block_bits,
                        m_bits,
                        groups: 0,
                    }),
                }
            }
        }
    }
    cells
}

fn cell_config(cell: &FrontierCell, spec: &FrontierSpec) -> FilterConfig {
    match cell.variant {
        Variant::Classical => {
            let mut config = FilterConfig::classical(cell.m_bits, spec.k, spec.seed);
            config.word_bits = spec.word_bits;
            config.block_bits = u64::from(spec.word_bits);
            config
        }
        Variant::Blocked => {
            FilterConfig::blocked(cell.m_bits, cell.block_bits, spec.word_bits, spec.k, spec.seed)
        }
        Variant::RegisterBlocked => {
            FilterConfig::register_blocked(cell.m_bits, spec.word_bits, spec.k, spec.seed)
        }
        Variant::Sectorized => {
            FilterConfig::sectorized(cell.m_bits, cell.block_bits, spec.word_bits, spec.k, spec.seed)
        }
        Variant::CacheSectorized => FilterConfig::cache_sectorized(
            cell.m_bits,
            cell.block_bits,
            spec.word_bits,
            spec.k,
            cell.groups,
            spec.seed,
        ),
    }
}

/// Measures one frontier cell: a coarse layout-selection pass (an eighth of
/// the keys) picks the fastest layout per op, the winner is re-measured at
/// full scale under the standard protocol, and the cell's false-positive
/// rate is measured at optimal load.
fn measure_cell(
    config: FilterConfig,
    spec: &FrontierSpec,
    baselines: (f64, f64),
) -> Result<[BenchReport; 2], BenchError> {
    let fpr = measure_fpr(config, spec.fpr_queries, spec.seed ^ 0xF00D, spec.workers)?;
    let (read_baseline, write_baseline) = baselines;

    let pick = ThroughputOptions {
        keys: (spec.keys / 8).max(1 << 16).min(spec.keys),
        workers: spec.workers,
        layout: None,
        key_seed: spec.seed,
        reps_cap: spec.reps_cap.max(2),
        stderr_threshold: f64::MAX, // selection pass: two quick repetitions
        baseline: None,
    };
    let mut reports = Vec::with_capacity(2);
    for op in [Op::Add, Op::Contains] {
        let (rows, best) = layout_grid_search(config, op, &pick)?;
        let best_layout = Layout::new(rows[best].theta, rows[best].phi)
            .expect("grid rows carry valid layouts");
        let full = ThroughputOptions {
            keys: spec.keys,
            workers: spec.workers,
            layout: Some(best_layout),
            key_seed: spec.seed,
            reps_cap: spec.reps_cap,
            stderr_threshold: spec.stderr_threshold,
            baseline: Some(match op {
                Op::Add => write_baseline,
                Op::Contains => read_baseline,
            }),
        };
        let mut report = measure_throughput(config, op, &full)?;
        report.fpr = Some(fpr.rate);
        report.fill_ratio = Some(fpr.fill_ratio);
        reports.push(report);
    }
    Ok(reports.try_into().expect("two ops measured"))
}

/// Runs a frontier sweep, writing CSV rows to `out` (flushed after every
/// cell so partial results survive a failing cell) and progress/diagnostics
/// to `log`.
pub fn frontier_sweep<W: Write>(
    spec: &FrontierSpec,
    out: &mut W,
    log: &mut dyn Write,
) -> std::io::Result<FrontierSummary> {
    writeln!(out, "{}", crate::report::CSV_HEADER)?;
    out.flush()?;

    let mut summary = FrontierSummary::default();
    let mut baselines: Option<(u64, (f64, f64))> = None;
    for cell in frontier_cells(spec) {
        let config = cell_config(&cell, spec);
        let label = crate::report::describe_config(&config);

        // One read/write baseline pair per filter size, reused across cells.
        let geometry = match config.geometry() {
            Ok(geometry) => geometry,
            Err(err) => {
                summary.cells_failed += 1;
                writeln!(log, "skipping {label}: {err}")?;
                continue;
            }
        };
        let bytes = geometry.m_effective / 8;
        let pair = match baselines {
            Some((cached_bytes, pair)) if cached_bytes == bytes => pair,
            _ => {
                let accesses = spec.keys.min(1 << 23);
                let pair = (
                    random_access_baseline(bytes, BaselineOp::Read, accesses, spec.seed),
                    random_access_baseline(bytes, BaselineOp::Write, accesses, spec.seed),
                );
                writeln!(
                    log,
                    "baseline @ {bytes} bytes: read {:.3e}/s, write {:.3e}/s",
                    pair.0, pair.1
                )?;
                baselines = Some((bytes, pair));
                pair
            }
        };

        match measure_cell(config, spec, pair) {
            Ok(rows) => {
                for row in &rows {
                    writeln!(out, "{}", row.csv_row())?;
                    writeln!(log, "{}", row.human_line())?;
                }
                out.flush()?;
                summary.cells_written += 1;
            }
            Err(err) => {
                summary.cells_failed += 1;
                writeln!(log, "cell {label} failed: {err}")?;
                out.flush()?;
            }
        }
    }
    Ok(summary)
}

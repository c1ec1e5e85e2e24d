//! Command-line surface: flags, defaults, and conversion into core
//! configurations and harness options.

use std::path::PathBuf;

use bloomkit::{FilterConfig, Layout, Variant};
use clap::{Args, Parser, Subcommand};

use crate::bench::{FrontierSpec, ThroughputOptions};
use crate::report::Op;

/// Blocked Bloom filter toolkit: sizing, measurement, and filter files.
#[derive(Parser, Debug)]
#[command(name = "bloomkit", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sizing report: optimal probe count and predicted rates for a
    /// filter of --m bits holding --n keys.
    Analyze(AnalyzeArgs),
    /// Measure the empirical false-positive rate of one configuration.
    Fpr(FprArgs),
    /// Time bulk add or contains for one configuration.
    Bench(BenchArgs),
    /// Time every traversal schedule for one configuration and mark the
    /// fastest.
    Grid(GridArgs),
    /// Sweep variants x blocks x sizes; write one accuracy/throughput CSV
    /// row per operation per cell.
    Frontier(FrontierArgs),
    /// Build a filter from a key file and store it.
    Build(BuildArgs),
    /// Query a stored filter; print one 0/1 line per key in input order.
    Query(QueryArgs),
    /// Run the built-in correctness battery (exit 3 on failure).
    Selftest,
}

/// Parses a filter size: a plain number is bits; `kb`/`mb`/`gb` (or
/// `kib`/`mib`/`gib`) suffixes are binary byte units, converted to bits.
pub fn parse_size_bits(text: &str) -> Result<u64, String> {
    let lower = text.trim().to_ascii_lowercase();
    const UNITS: [(&str, u64); 6] = [
        ("gib", 8 << 30),
        ("mib", 8 << 20),
        ("kib", 8 << 10),
        ("gb", 8 << 30),
        ("mb", 8 << 20),
        ("kb", 8 << 10),
    ];
    for (suffix, bits_per_unit) in UNITS {
        if let Some(digits) = lower.strip_suffix(suffix) {
            let value: u64 = digits
                .trim()
                .parse()
                .map_err(|_| format!("invalid size `{text}`"))?;
            return value
                .checked_mul(bits_per_unit)
                .ok_or_else(|| format!("size `{text}` overflows"));
        }
    }
    lower
        .parse()
        .map_err(|_| format!("invalid size `{text}` (plain bits or a kb/mb/gb suffix)"))
}

fn parse_variant(text: &str) -> Result<Variant, String> {
    Variant::from_name(&text.to_ascii_lowercase())
        .ok_or_else(|| format!("unknown variant `{text}` (expected cbf, bbf, rbbf, sbf, or csbf)"))
}

fn parse_op(text: &str) -> Result<Op, String> {
    match text.to_ascii_lowercase().as_str() {
        "add" => Ok(Op::Add),
        "contains" => Ok(Op::Contains),
        other => Err(format!("unknown operation `{other}` (expected add or contains)")),
    }
}

/// Flags shared by every subcommand that names a filter configuration.
#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    /// Variant: cbf, bbf, rbbf, sbf, or csbf.
    #[arg(long, default_value = "cbf", value_parser = parse_variant)]
    pub variant: Variant,
    /// Filter size: plain bits, or kb/mb/gb suffix for binary byte units.
    #[arg(long, default_value = "33554432", value_parser = parse_size_bits)]
    pub m: u64,
    /// Block size in bits (power of two; unused by cbf, forced to the word
    /// size by rbbf).
    #[arg(long, default_value_t = 256)]
    pub block: u64,
    /// Word size in bits (32 or 64).
    #[arg(long, default_value_t = 64)]
    pub word: u32,
    /// Probe bits per key.
    #[arg(long, default_value_t = 16)]
    pub k: u32,
    /// Word groups per block (csbf only).
    #[arg(long)]
    pub z: Option<u32>,
    /// Seed for salt tables and generated keys.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

impl ConfigArgs {
    /// Builds and validates the configuration these flags describe.
    pub fn to_config(&self) -> Result<FilterConfig, String> {
        if self.z.is_some() && self.variant != Variant::CacheSectorized {
            return Err(format!(
                "--z only applies to csbf (variant is {})",
                self.variant.name()
            ));
        }
        let config = match self.variant {
            Variant::Classical => {
                let mut config = FilterConfig::classical(self.m, self.k, self.seed);
                config.word_bits = self.word;
                config.block_bits = u64::from(self.word);
                config
            }
            Variant::Blocked => {
                FilterConfig::blocked(self.m, self.block, self.word, self.k, self.seed)
            }
            Variant::RegisterBlocked => {
                FilterConfig::register_blocked(self.m, self.word, self.k, self.seed)
            }
            Variant::Sectorized => {
                FilterConfig::sectorized(self.m, self.block, self.word, self.k, self.seed)
            }
            Variant::CacheSectorized => {
                let z = self
                    .z
                    .ok_or("csbf requires --z (word groups per block)")?;
                FilterConfig::cache_sectorized(self.m, self.block, self.word, self.k, z, self.seed)
            }
        };
        config.geometry().map_err(|err| err.to_string())?;
        Ok(config)
    }
}

/// Timing flags shared by `bench` and `grid`.
#[derive(Args, Debug, Clone)]
pub struct TimingArgs {
    /// Keys to insert or query per repetition.
    #[arg(long, default_value_t = 10_000_000)]
    pub keys: u64,
    /// Worker threads for bulk operations.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Maximum timed repetitions while chasing a stable mean.
    #[arg(long, default_value_t = 9)]
    pub reps_cap: u32,
    /// Relative standard-error target for the timed mean.
    #[arg(long, default_value_t = 0.02)]
    pub stderr: f64,
}

/// Output-mode flags: default is one human-readable line.
#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Emit CSV (schema header plus one row per measurement).
    #[arg(long)]
    pub csv: bool,
    /// Emit pretty-printed JSON with all measured fields.
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Filter size (plain bits or kb/mb/gb suffix).
    #[arg(long, value_parser = parse_size_bits)]
    pub m: u64,
    /// Keys the filter must hold.
    #[arg(long)]
    pub n: u64,
    /// Evaluate this probe count instead of the optimum.
    #[arg(long)]
    pub k: Option<u32>,
}

#[derive(Args, Debug)]
pub struct FprArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Disjoint keys to query after inserting the optimal load.
    #[arg(long, default_value_t = 10_000_000)]
    pub queries: u64,
    /// Worker threads for bulk operations.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Operation to time: add or contains.
    #[arg(long, default_value = "contains", value_parser = parse_op)]
    pub op: Op,
    #[command(flatten)]
    pub timing: TimingArgs,
    /// Force this many parallel lanes (requires --phi).
    #[arg(long, requires = "phi")]
    pub theta: Option<u32>,
    /// Force this many words per lane step (requires --theta).
    #[arg(long, requires = "theta")]
    pub phi: Option<u32>,
    /// Also measure the host's random-access bound and report throughput
    /// as a fraction of it.
    #[arg(long)]
    pub sol: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl BenchArgs {
    /// The forced layout, if both halves were given.
    pub fn layout(&self) -> Result<Option<Layout>, String> {
        match (self.theta, self.phi) {
            (Some(theta), Some(phi)) => Layout::new(theta, phi)
                .map(Some)
                .map_err(|err| err.to_string()),
            _ => Ok(None),
        }
    }
}

#[derive(Args, Debug)]
pub struct GridArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Operation to time: add or contains.
    #[arg(long, default_value = "contains", value_parser = parse_op)]
    pub op: Op,
    #[command(flatten)]
    pub timing: TimingArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

impl TimingArgs {
    /// Harness options for these flags.
    pub fn to_options(&self, key_seed: u64, layout: Option<Layout>) -> ThroughputOptions {
        ThroughputOptions {
            keys: self.keys,
            workers: self.workers,
            layout,
            key_seed,
            reps_cap: self.reps_cap,
            stderr_threshold: self.stderr,
            baseline: None,
        }
    }
}

#[derive(Args, Debug)]
pub struct FrontierArgs {
    /// Comma-separated variants to sweep.
    #[arg(
        long,
        default_value = "cbf,bbf,rbbf,sbf,csbf",
        value_delimiter = ',',
        value_parser = parse_variant
    )]
    pub variants: Vec<Variant>,
    /// Comma-separated block sizes in bits.
    #[arg(long, default_value = "64,256,512", value_delimiter = ',')]
    pub blocks: Vec<u64>,
    /// Comma-separated filter sizes (plain bits or kb/mb/gb suffixes).
    #[arg(
        long,
        default_value = "4mb,32mb",
        value_delimiter = ',',
        value_parser = parse_size_bits
    )]
    pub sizes: Vec<u64>,
    /// Output CSV path; `-` writes to stdout.
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Word size in bits (32 or 64).
    #[arg(long, default_value_t = 64)]
    pub word: u32,
    /// Probe bits per key.
    #[arg(long, default_value_t = 16)]
    pub k: u32,
    /// Keys per timed repetition.
    #[arg(long, default_value_t = 10_000_000)]
    pub keys: u64,
    /// Disjoint queries for each cell's rate measurement.
    #[arg(long, default_value_t = 10_000_000)]
    pub queries: u64,
    /// Worker threads for bulk operations.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Seed for salt tables and generated keys.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Maximum timed repetitions while chasing a stable mean.
    #[arg(long, default_value_t = 9)]
    pub reps_cap: u32,
    /// Relative standard-error target for the timed mean.
    #[arg(long, default_value_t = 0.02)]
    pub stderr: f64,
}

impl FrontierArgs {
    /// The sweep specification these flags describe.
    pub fn to_spec(&self) -> FrontierSpec {
        FrontierSpec {
            variants: self.variants.clone(),
            blocks: self.blocks.clone(),
            sizes: self.sizes.clone(),
            word_bits: self.word,
            k: self.k,
            keys: self.keys,
            fpr_queries: self.queries,
            workers: self.workers,
            seed: self.seed,
            reps_cap: self.reps_cap,
            stderr_threshold: self.stderr,
        }
    }
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Input key file: raw little-endian 64-bit records unless --text.
    #[arg(long)]
    pub keys_file: PathBuf,
    /// Where to write the serialized filter.
    #[arg(long)]
    pub out: PathBuf,
    /// Treat the key file as text, one decimal integer per line.
    #[arg(long)]
    pub text: bool,
}

#[derive(Args, Debug)]
pub struct QueryArgs {
    /// Serialized filter to load.
    #[arg(long)]
    pub filter: PathBuf,
    /// Keys to look up: raw little-endian 64-bit records unless --text.
    #[arg(long)]
    pub keys_file: PathBuf,
    /// Treat the key file as text, one decimal integer per line.
    #[arg(long)]
    pub text: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_surface_is_internally_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn sizes_parse_as_bits_or_binary_byte_units() {
        assert_eq!(parse_size_bits("1048576").unwrap(), 1048576);
        assert_eq!(parse_size_bits("32mb").unwrap(), 32 * (8 << 20));
        assert_eq!(parse_size_bits("1gb").unwrap(), 8 << 30);
        assert_eq!(parse_size_bits("2KiB").unwrap(), 2 * (8 << 10));
        assert_eq!(parse_size_bits("1gb").unwrap(), parse_size_bits("1gib").unwrap());
        assert!(parse_size_bits("12 parsecs").is_err());
        assert!(parse_size_bits("99999999999gb").is_err());
    }

    fn config_args(argv: &[&str]) -> ConfigArgs {
        let mut full = vec!["bloomkit", "fpr"];
        full.extend_from_slice(argv);
        match Cli::try_parse_from(full).unwrap().command {
            Command::Fpr(args) => args.config,
            _ => unreachable!(),
        }
    }

    #[test]
    fn variant_flags_map_to_the_right_constructors() {
        let cbf = config_args(&["--variant", "cbf", "--word", "32"]).to_config().unwrap();
        assert_eq!(cbf.variant, Variant::Classical);
        assert_eq!((cbf.block_bits, cbf.word_bits), (32, 32));

        let sbf = config_args(&["--variant", "sbf", "--block", "512", "--k", "16"])
            .to_config()
            .unwrap();
        assert_eq!(sbf.variant, Variant::Sectorized);
        assert_eq!(sbf.block_bits, 512);

        let rbbf = config_args(&["--variant", "rbbf", "--block", "512", "--k", "4"])
            .to_config()
            .unwrap();
        assert_eq!(rbbf.block_bits, u64::from(rbbf.word_bits));

        let csbf = config_args(&["--variant", "csbf", "--z", "4", "--k", "8"])
            .to_config()
            .unwrap();
        assert_eq!(csbf.groups, 4);
    }

    #[test]
    fn invalid_combinations_are_usage_errors_with_the_cause_named() {
        let err = config_args(&["--variant", "sbf", "--block", "256", "--k", "7"])
            .to_config()
            .unwrap_err();
        assert!(err.contains("divisible"), "{err}");

        let err = config_args(&["--variant", "csbf"]).to_config().unwrap_err();
        assert!(err.contains("--z"), "{err}");

        let err = config_args(&["--variant", "bbf", "--z", "4"]).to_config().unwrap_err();
        assert!(err.contains("--z"), "{err}");
    }

    #[test]
    fn forced_layouts_require_both_halves() {
        assert!(Cli::try_parse_from(["bloomkit", "bench", "--theta", "2"]).is_err());
        assert!(Cli::try_parse_from(["bloomkit", "bench", "--theta", "2", "--phi", "2"]).is_ok());
        assert!(Cli::try_parse_from(["bloomkit", "bench", "--csv", "--json"]).is_err());
    }

    #[test]
    fn frontier_lists_split_on_commas() {
        let cli = Cli::try_parse_from([
            "bloomkit",
            "frontier",
            "--variants",
            "sbf,csbf",
            "--blocks",
            "256,512",
            "--sizes",
            "4mb,32mb",
        ])
        .unwrap();
        match cli.command {
            Command::Frontier(args) => {
                let spec = args.to_spec();
                assert_eq!(spec.variants, vec![Variant::Sectorized, Variant::CacheSectorized]);
                assert_eq!(spec.blocks, vec![256, 512]);
                assert_eq!(spec.sizes, vec![4 * (8 << 20), 32 * (8 << 20)]);
            }
            _ => unreachable!(),
        }
    }
}

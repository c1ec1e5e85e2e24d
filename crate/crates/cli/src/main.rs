//! `bloomkit` binary: dispatches subcommands and maps failures onto the
//! exit-code contract (0 success, 1 usage, 2 runtime, 3 failed selftest).

use std::fs;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use bloomkit::{analytics, codec, Filter};
use clap::error::ErrorKind;
use clap::Parser;

use bloomkit_cli::args::{
    AnalyzeArgs, BenchArgs, BuildArgs, Cli, Command, FprArgs, FrontierArgs, GridArgs, QueryArgs,
};
use bloomkit_cli::bench::{
    frontier_sweep, layout_grid_search, measure_fpr, measure_throughput, random_access_baseline,
    BaselineOp, BenchError,
};
use bloomkit_cli::keyfile;
use bloomkit_cli::report::{self, describe_config, Op};
use bloomkit_cli::selftest;

/// A failure paired with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 1,
        error: error.into(),
    }
}

fn runtime(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        error: error.into(),
    }
}

fn from_bench(error: BenchError) -> Failure {
    if error.is_usage() {
        usage(error)
    } else {
        runtime(error)
    }
}

fn usage_msg(message: String) -> Failure {
    usage(anyhow!(message))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1u8,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Analyze(args) => run_analyze(&args)?,
        Command::Fpr(args) => run_fpr(&args)?,
        Command::Bench(args) => run_bench(&args)?,
        Command::Grid(args) => run_grid(&args)?,
        Command::Frontier(args) => run_frontier(&args)?,
        Command::Build(args) => run_build(&args)?,
        Command::Query(args) => run_query(&args)?,
        Command::Selftest => {
            let mut out = io::stdout().lock();
            let passed = selftest::run(&mut out).map_err(runtime)?;
            if !passed {
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let sizing = analytics::size_filter(args.m, args.n, args.k).map_err(usage)?;
    println!("m_bits = {}", args.m);
    println!("n_keys = {}", args.n);
    println!("c = {:.4} bits/key", sizing.bits_per_key);
    println!("k_real = {:.4}", sizing.k_real);
    println!("k_opt = {}", sizing.k);
    println!("predicted_fpr = {:.4e}", sizing.predicted_fpr);
    println!("f_min = {:.4e}", sizing.fpr_floor);
    println!("n_opt = {}", sizing.n_optimal);
    Ok(())
}

fn run_fpr(args: &FprArgs) -> Result<(), Failure> {
    let config = args.config.to_config().map_err(usage_msg)?;
    let outcome =
        measure_fpr(config, args.queries, config.seed, args.workers).map_err(from_bench)?;
    let geometry = config.geometry().map_err(usage)?;
    if args.output.json {
        let json = serde_json::json!({
            "variant": config.variant.name(),
            "m_bits": config.m_bits,
            "B": config.block_bits,
            "S": config.word_bits,
            "k": config.k,
            "z": config.groups,
            "m_effective": geometry.m_effective,
            "inserted": outcome.inserted,
            "queried": outcome.queried,
            "positives": outcome.positives,
            "fpr": outcome.rate,
            "predicted_fpr": outcome.predicted,
            "fill_ratio": outcome.fill_ratio,
        });
        println!("{}", serde_json::to_string_pretty(&json).map_err(runtime)?);
    } else if args.output.csv {
        println!("variant,m_bits,B,S,k,z,inserted,queried,positives,fpr,predicted_fpr,fill_ratio");
        println!(
            "{},{},{},{},{},{},{},{},{},{:.6e},{:.6e},{:.6}",
            config.variant.name(),
            config.m_bits,
            config.block_bits,
            config.word_bits,
            config.k,
            config.groups,
            outcome.inserted,
            outcome.queried,
            outcome.positives,
            outcome.rate,
            outcome.predicted,
            outcome.fill_ratio,
        );
    } else {
        println!(
            "{} inserted={} queried={} positives={} fpr={:.4e} predicted={:.4e} fill={:.4}",
            describe_config(&config),
            outcome.inserted,
            outcome.queried,
            outcome.positives,
            outcome.rate,
            outcome.predicted,
            outcome.fill_ratio,
        );
    }
    Ok(())
}

fn run_bench(args: &BenchArgs) -> Result<(), Failure> {
    let config = args.config.to_config().map_err(usage_msg)?;
    let layout = args.layout().map_err(usage_msg)?;
    let mut opts = args.timing.to_options(config.seed, layout);
    if args.sol {
        let geometry = config.geometry().map_err(usage)?;
        let bytes = geometry.total_words * u64::from(config.word_bits) / 8;
        let op = match args.op {
            Op::Add => BaselineOp::Write,
            Op::Contains => BaselineOp::Read,
        };
        opts.baseline = Some(random_access_baseline(
            bytes,
            op,
            args.timing.keys.min(1 << 24),
            config.seed,
        ));
    }
    let report = measure_throughput(config, args.op, &opts).map_err(from_bench)?;
    let mut out = io::stdout().lock();
    if args.output.json {
        writeln!(out, "{}", report::to_json(&[report])).map_err(runtime)?;
    } else if args.output.csv {
        report::write_csv(&mut out, &[report], None).map_err(runtime)?;
    } else {
        writeln!(out, "{}", report.human_line()).map_err(runtime)?;
    }
    Ok(())
}

fn run_grid(args: &GridArgs) -> Result<(), Failure> {
    let config = args.config.to_config().map_err(usage_msg)?;
    let opts = args.timing.to_options(config.seed, None);
    let (reports, best) = layout_grid_search(config, args.op, &opts).map_err(from_bench)?;
    let mut out = io::stdout().lock();
    if args.output.json {
        let json = serde_json::json!({ "best": best, "rows": reports });
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&json).map_err(runtime)?
        )
        .map_err(runtime)?;
    } else if args.output.csv {
        report::write_csv(&mut out, &reports, Some(best)).map_err(runtime)?;
    } else {
        for (index, report) in reports.iter().enumerate() {
            let marker = if index == best { " <- best" } else { "" };
            writeln!(out, "{}{marker}", report.human_line()).map_err(runtime)?;
        }
    }
    Ok(())
}

fn run_frontier(args: &FrontierArgs) -> Result<(), Failure> {
    let spec = args.to_spec();
    let mut log = io::stderr().lock();
    let summary = if args.out == "-" {
        let mut out = io::stdout().lock();
        frontier_sweep(&spec, &mut out, &mut log).map_err(runtime)?
    } else {
        let file = fs::File::create(&args.out)
            .with_context(|| format!("cannot create {}", args.out))
            .map_err(runtime)?;
        let mut out = BufWriter::new(file);
        let summary = frontier_sweep(&spec, &mut out, &mut log).map_err(runtime)?;
        out.flush()
            .with_context(|| format!("cannot write {}", args.out))
            .map_err(runtime)?;
        summary
    };
    eprintln!(
        "frontier: {} cells written, {} failed",
        summary.cells_written, summary.cells_failed
    );
    if summary.cells_written == 0 && summary.cells_failed > 0 {
        return Err(runtime(anyhow!("every frontier cell failed")));
    }
    Ok(())
}

fn run_build(args: &BuildArgs) -> Result<(), Failure> {
    let config = args.config.to_config().map_err(usage_msg)?;
    let keys = keyfile::read_keys(&args.keys_file, args.text).map_err(runtime)?;
    let filter = Filter::new(config).map_err(|err| from_bench(BenchError::from(err)))?;
    filter.bulk_add(&keys);
    let bytes = codec::serialize(&filter);
    fs::write(&args.out, &bytes)
        .with_context(|| format!("cannot write {}", args.out.display()))
        .map_err(runtime)?;
    println!(
        "built {} keys={} fill={:.4} -> {} ({} bytes)",
        describe_config(&config),
        keys.len(),
        filter.fill_ratio(),
        args.out.display(),
        bytes.len(),
    );
    Ok(())
}

fn run_query(args: &QueryArgs) -> Result<(), Failure> {
    let bytes = fs::read(&args.filter)
        .with_context(|| format!("cannot read {}", args.filter.display()))
        .map_err(runtime)?;
    let filter = codec::deserialize(&bytes)
        .with_context(|| format!("cannot decode {}", args.filter.display()))
        .map_err(runtime)?;
    let keys = keyfile::read_keys(&args.keys_file, args.text).map_err(runtime)?;
    let answers = filter.bulk_contains(&keys);
    let mut out = BufWriter::new(io::stdout().lock());
    for hit in answers {
        writeln!(out, "{}", u8::from(hit)).map_err(runtime)?;
    }
    out.flush().map_err(runtime)?;
    Ok(())
}

//! Measurement records and their CSV / JSON encodings.
//!
//! The CSV schema is fixed (one header row):
//! `variant,m_bits,B,S,k,z,theta,phi,op,workers,keys,elapsed_s,throughput_eps,fpr,fill_ratio,sol_fraction`.
//! Grid-search tables append one extra `best` column marking the
//! highest-throughput layout. The JSON encoding mirrors the same records and
//! additionally carries the repetition count and achieved relative standard
//! error.

use std::fmt;
use std::io::Write;

use bloomkit::{FilterConfig, Geometry, Variant};
use serde::Serialize;

/// The fixed CSV header (without the grid-only `best` marker).
pub const CSV_HEADER: &str =
    "variant,m_bits,B,S,k,z,theta,phi,op,workers,keys,elapsed_s,throughput_eps,fpr,fill_ratio,sol_fraction";

/// Which bulk operation a record measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    /// Bulk insertion.
    Add,
    /// Bulk membership lookup.
    Contains,
}

impl Op {
    /// The CSV/flag spelling.
    pub fn name(self) -> &'static str {
        match self {
            Op::Add => "add",
            Op::Contains => "contains",
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One throughput (or FPR) measurement over a concrete configuration.
#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    /// Variant short name (`cbf`, `bbf`, `rbbf`, `sbf`, `csbf`).
    pub variant: &'static str,
    /// Effective filter size in bits.
    pub m_bits: u64,
    /// Block size in bits.
    #[serde(rename = "B")]
    pub block_bits: u64,
    /// Word size in bits.
    #[serde(rename = "S")]
    pub word_bits: u32,
    /// Probe bits per key.
    pub k: u32,
    /// Word groups per block (0 when not applicable).
    pub z: u32,
    /// Horizontal lanes of the execution layout.
    pub theta: u32,
    /// Words per lane per step of the execution layout.
    pub phi: u32,
    /// Operation measured.
    pub op: Op,
    /// Worker threads the bulk calls were given.
    pub workers: usize,
    /// Keys processed per repetition.
    pub keys: u64,
    /// Total wall-clock seconds across the counted repetitions.
    pub elapsed_s: f64,
    /// `keys * repetitions / elapsed_s`.
    pub throughput_eps: f64,
    /// Measured false-positive rate, when the run measured one.
    pub fpr: Option<f64>,
    /// Fill ratio after population, when the run recorded one.
    pub fill_ratio: Option<f64>,
    /// Throughput as a fraction of the host's random-access baseline, when
    /// a baseline was measured.
    pub sol_fraction: Option<f64>,
    /// Counted (timed) repetitions.
    pub repetitions: u32,
    /// Achieved relative standard error of the per-repetition throughputs.
    pub relative_stderr: f64,
}

fn opt(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.6e}")).unwrap_or_default()
}

impl BenchReport {
    /// A report skeleton for `config` with no measurements filled in yet.
    pub fn for_config(config: &FilterConfig, geometry: &Geometry, op: Op) -> Self {
        BenchReport {
            variant: config.variant.name(),
            m_bits: geometry.m_effective,
            block_bits: config.block_bits,
            word_bits: config.word_bits,
            k: config.k,
            z: config.groups,
            theta: config.layout.theta(),
            phi: config.layout.phi(),
            op,
            workers: 1,
            keys: 0,
            elapsed_s: 0.0,
            throughput_eps: 0.0,
            fpr: None,
            fill_ratio: None,
            sol_fraction: None,
            repetitions: 0,
            relative_stderr: 0.0,
        }
    }

    /// The record as one CSV row matching [`CSV_HEADER`].
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{:.6},{:.6e},{},{},{}",
            self.variant,
            self.m_bits,
            self.block_bits,
            self.word_bits,
            self.k,
            self.z,
            self.theta,
            self.phi,
            self.op,
            self.workers,
            self.keys,
            self.elapsed_s,
            self.throughput_eps,
            opt(self.fpr),
            opt(self.fill_ratio),
            opt(self.sol_fraction),
        )
    }

    /// A one-line human-readable summary.
    pub fn human_line(&self) -> String {
        let mut line = format!(
            "{} m={} B={} S={} k={} z={} layout=({},{}) {} workers={}: {:.3e} elem/s \
             ({} keys x {} reps in {:.4} s, rel stderr {:.2}%)",
            self.variant,
            self.m_bits,
            self.block_bits,
            self.word_bits,
            self.k,
            self.z,
            self.theta,
            self.phi,
            self.op,
            self.workers,
            self.throughput_eps,
            self.keys,
            self.repetitions,
            self.elapsed_s,
            self.relative_stderr * 100.0,
        );
        if let Some(fpr) = self.fpr {
            line.push_str(&format!(" fpr={fpr:.4e}"));
        }
        if let Some(fill) = self.fill_ratio {
            line.push_str(&format!(" fill={fill:.4}"));
        }
        if let Some(sol) = self.sol_fraction {
            line.push_str(&format!(" sol={:.1}%", sol * 100.0));
        }
        line
    }
}

/// Writes `reports` as a CSV table. `best` (grid tables) appends a marker
/// column whose value is 1 on the argmax row and 0 elsewhere.
pub fn write_csv<W: Write>(
    out: &mut W,
    reports: &[BenchReport],
    best: Option<usize>,
) -> std::io::Result<()> {
    match best {
        None => {
            writeln!(out, "{CSV_HEADER}")?;
            for report in reports {
                writeln!(out, "{}", report.csv_row())?;
            }
        }
        Some(index) => {
            writeln!(out, "{CSV_HEADER},best")?;
            for (row, report) in reports.iter().enumerate() {
                writeln!(out, "{},{}", report.csv_row(), u8::from(row == index))?;
            }
        }
    }
    out.flush()
}

/// Serializes `reports` as a JSON array (the mirror of the CSV records).
pub fn to_json(reports: &[BenchReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize infallibly")
}

/// Helper: the variant/shape columns of a config for error messages.
pub fn describe_config(config: &FilterConfig) -> String {
    let z = if config.variant == Variant::CacheSectorized {
        format!(" z={}", config.groups)
    } else {
        String::new()
    };
    format!(
        "{} m={} B={} S={} k={}{z}",
        config.variant, config.m_bits, config.block_bits, config.word_bits, config.k
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> BenchReport {
        let config = FilterConfig::sectorized(1 << 20, 256, 64, 16, 7);
        let geometry = config.geometry().unwrap();
        let mut report = BenchReport::for_config(&config, &geometry, Op::Contains);
        report.keys = 1000;
        report.elapsed_s = 0.5;
        report.repetitions = 2;
        report.throughput_eps = 4000.0;
        report.relative_stderr = 0.01;
        report
    }

    #[test]
    fn csv_row_matches_the_header_shape() {
        let report = sample();
        assert_eq!(
            CSV_HEADER.split(',').count(),
            report.csv_row().split(',').count()
        );
        let mut bytes = Vec::new();
        write_csv(&mut bytes, &[report], None).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next().unwrap().split(',').next(), Some("sbf"));
    }

    #[test]
    fn grid_tables_mark_exactly_one_best_row() {
        let reports = vec![sample(), sample(), sample()];
        let mut bytes = Vec::new();
        write_csv(&mut bytes, &reports, Some(1)).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().ends_with(",best"));
        let markers: Vec<&str> = lines.map(|l| l.rsplit(',').next().unwrap()).collect();
        assert_eq!(markers, ["0", "1", "0"]);
    }

    #[test]
    fn json_mirrors_the_schema_names() {
        let json = to_json(&[sample()]);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let record = &value[0];
        for field in CSV_HEADER.split(',') {
            assert!(
                record.get(field).is_some(),
                "JSON record is missing {field}"
            );
        }
        assert!(record.get("repetitions").is_some());
        assert!(record.get("relative_stderr").is_some());
    }

    #[test]
    fn empty_measurements_leave_blank_csv_cells() {
        let report = sample();
        let row = report.csv_row();
        assert!(row.ends_with(",,,"), "{row}");
    }
}

//! On-disk formats: raw runs, failures, traces, metadata and point files.

use std::fs::{self, File, OpenOptions};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use temof_core::metrics::HV_EXACT_MAX_OBJ;
use temof_core::stats::{RANKSUM_EXACT_MAX_TOTAL, SIGNED_RANK_EXACT_MAX_N};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

pub const RUNS_FILE: &str = "runs.csv";
pub const FAILURES_FILE: &str = "failures.csv";
pub const TRACES_FILE: &str = "traces.csv";
pub const METADATA_FILE: &str = "metadata.json";

/// One indicator value of one run: a row of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub problem: String,
    pub algorithm: String,
    pub seed: u64,
    pub metric: String,
    pub value: f64,
    pub fes: u64,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRow {
    pub problem: String,
    pub algorithm: String,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub problem: String,
    pub algorithm: String,
    pub seed: u64,
    pub generations: usize,
    pub archive_generations: usize,
    pub first_archive_fes: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub ranksum_exact_max_total: usize,
    pub signed_rank_exact_max_n: usize,
    pub hv_exact_max_obj: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            ranksum_exact_max_total: RANKSUM_EXACT_MAX_TOTAL,
            signed_rank_exact_max_n: SIGNED_RANK_EXACT_MAX_N,
            hv_exact_max_obj: HV_EXACT_MAX_OBJ,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInfo {
    pub label: String,
    pub n_var: usize,
    pub n_obj: usize,
    pub front_points: usize,
    pub hv_reference: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub fingerprint: String,
    pub software: String,
    pub version: String,
    pub seeds: Vec<u64>,
    pub thresholds: Thresholds,
    pub problems: Vec<ProblemInfo>,
    pub config: ExperimentConfig,
}

impl Metadata {
    pub fn read(dir: &Path) -> Result<Option<Self>> {
        let path = dir.join(METADATA_FILE);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| HarnessError::format(&path, e.to_string()))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(METADATA_FILE);
        let text = serde_json::to_string_pretty(self).expect("metadata serializes");
        fs::write(&path, text + "\n").map_err(|e| HarnessError::io(&path, e))
    }
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut reader = csv::Reader::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    reader
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| HarnessError::csv(path, e))
}

/// Replaces `path` with `rows` (header included) via a temporary file.
pub fn write_rows<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let tmp = path.with_extension("csv.tmp");
    {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_path(&tmp)
            .map_err(|e| HarnessError::csv(&tmp, e))?;
        w.write_record(header).map_err(|e| HarnessError::csv(&tmp, e))?;
        for r in rows {
            w.serialize(r).map_err(|e| HarnessError::csv(&tmp, e))?;
        }
        w.flush().map_err(|e| HarnessError::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| HarnessError::io(path, e))
}

/// Append-only CSV writer that emits the header only for a new, empty file.
pub struct Appender {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl Appender {
    pub fn open(path: &Path, header: &[&str]) -> Result<Self> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| HarnessError::io(path, e))?;
        let fresh = file.metadata().map_err(|e| HarnessError::io(path, e))?.len() == 0;
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        if fresh {
            writer.write_record(header).map_err(|e| HarnessError::csv(path, e))?;
        }
        Ok(Self {
            path: path.to_owned(),
            writer,
        })
    }

    pub fn append<T: Serialize>(&mut self, row: &T) -> Result<()> {
        self.writer
            .serialize(row)
            .map_err(|e| HarnessError::csv(&self.path, e))?;
        self.writer.flush().map_err(|e| HarnessError::io(&self.path, e))
    }
}

pub const RUN_HEADER: [&str; 7] = ["problem", "algorithm", "seed", "metric", "value", "fes", "wall_ms"];
pub const FAILURE_HEADER: [&str; 4] = ["problem", "algorithm", "seed", "error"];
pub const TRACE_HEADER: [&str; 6] = [
    "problem",
    "algorithm",
    "seed",
    "generations",
    "archive_generations",
    "first_archive_fes",
];

/// Reads a point file: one objective vector per row, comma separated. A
/// first row that does not parse as numbers is treated as a header.
pub fn read_points(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| HarnessError::csv(path, e))?;
    let mut points = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| HarnessError::csv(path, e))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(p) => points.push(p),
            Err(_) if line == 0 => continue,
            Err(e) => {
                return Err(HarnessError::format(path, format!("row {}: {e}", line + 1)));
            }
        }
    }
    if points.is_empty() {
        return Err(HarnessError::format(path, "no points"));
    }
    let m = points[0].len();
    if let Some(i) = points.iter().position(|p| p.len() != m) {
        return Err(HarnessError::format(
            path,
            format!("row {} has {} values, expected {m}", i + 1, points[i].len()),
        ));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(HarnessError::format(path, "non-finite value"));
    }
    Ok(points)
}

//! Runs the problems x algorithms x seeds matrix.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::mpsc;
use std::time::Instant;

use rayon::prelude::*;
use temof_core::benchmarks::Benchmark;
use temof_core::dominance::nondominated_indices;
use temof_core::metrics::{gd, hv, igd, scaled_nadir, Indicator};
use temof_core::nsga3::Nsga3Selection;
use temof_core::temof::{baseline_run, temof_run, RunOutcome};
use temof_core::{Problem, Purpose, RngSeed};

use crate::config::{AlgorithmEntry, AlgorithmKind, ExperimentConfig, IndicatorTarget};
use crate::error::{HarnessError, Result};
use crate::records::{
    read_rows, write_rows, Appender, FailureRow, Metadata, ProblemInfo, RunRow, Thresholds,
    TraceRow, FAILURES_FILE, FAILURE_HEADER, RUNS_FILE, RUN_HEADER, TRACES_FILE, TRACE_HEADER,
};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "TEMOF_WORKERS";

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub fingerprint: String,
    pub problem: String,
    pub algorithm: String,
    pub seed: u64,
    pub fes: u64,
    pub values: Vec<(Indicator, f64)>,
    pub wall_ms: u64,
    pub trace: TraceRow,
}

impl RunRecord {
    fn rows(&self) -> Vec<RunRow> {
        self.values
            .iter()
            .map(|(ind, value)| RunRow {
                problem: self.problem.clone(),
                algorithm: self.algorithm.clone(),
                seed: self.seed,
                metric: ind.name().to_owned(),
                value: *value,
                fes: self.fes,
                wall_ms: self.wall_ms,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct MatrixOutcome {
    /// Records produced by this invocation.
    pub executed: Vec<RunRecord>,
    /// Jobs found complete on disk and skipped.
    pub skipped: usize,
    pub failures: Vec<FailureRow>,
}

/// A problem instance with its reference front and HV reference point.
struct Prepared {
    label: String,
    problem: Benchmark,
    front: Vec<Vec<f64>>,
    hv_ref: Vec<f64>,
}

struct Job<'a> {
    problem: &'a Prepared,
    algorithm: &'a AlgorithmEntry,
    seed: u64,
}

enum Message {
    Done(RunRecord),
    Failed(FailureRow),
}

/// Worker count from [`WORKERS_ENV`]; `None` lets rayon decide.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(HarnessError::Config(format!(
                "{WORKERS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
    }
}

fn prepare(config: &ExperimentConfig) -> Result<Vec<Prepared>> {
    config
        .problems
        .iter()
        .map(|entry| {
            let problem = entry.build()?;
            let front = problem.sample_front(config.front_samples)?;
            let hv_ref = scaled_nadir(&front, config.hv_ref_factor)?;
            Ok(Prepared {
                label: entry.label(),
                problem,
                front,
                hv_ref,
            })
        })
        .collect()
}

fn execute(job: &Job<'_>, config: &ExperimentConfig, indicators: &[Indicator], fingerprint: &str) -> Result<RunRecord> {
    let started = Instant::now();
    let problem = &job.problem.problem;
    let n = config.population_size;
    let framework = job.algorithm.framework(n, config.max_fes);
    let variation = job.algorithm.variation();
    let mut selection = Nsga3Selection::for_population(problem.n_obj(), n)?;
    let seed = RngSeed::new(job.seed);
    let outcome: RunOutcome = match job.algorithm.kind {
        AlgorithmKind::Nsga3 => baseline_run(problem, &framework, &variation, &mut selection, seed, |_| {})?,
        AlgorithmKind::TemofNsga3 => temof_run(problem, &framework, &variation, &mut selection, seed, |_| {})?,
    };

    let objectives = outcome.population.objectives()?;
    let target: Vec<&[f64]> = match config.target {
        IndicatorTarget::Population => objectives,
        IndicatorTarget::Nondominated => nondominated_indices(&objectives)
            .into_iter()
            .map(|i| objectives[i])
            .collect(),
    };
    let mut mc_rng = seed.stream(Purpose::MonteCarlo);
    let values = indicators
        .iter()
        .map(|&ind| {
            let r = match ind {
                Indicator::Igd => igd(&target, &job.problem.front)?,
                Indicator::Gd => gd(&target, &job.problem.front)?,
                Indicator::Hv => hv(&target, &job.problem.hv_ref, config.hv_samples, &mut mc_rng)?,
            };
            Ok((ind, r.value))
        })
        .collect::<Result<Vec<_>>>()?;

    let label = job.algorithm.label();
    Ok(RunRecord {
        fingerprint: fingerprint.to_owned(),
        problem: job.problem.label.clone(),
        algorithm: label.clone(),
        seed: job.seed,
        fes: outcome.fes,
        values,
        wall_ms: started.elapsed().as_millis() as u64,
        trace: TraceRow {
            problem: job.problem.label.clone(),
            algorithm: label,
            seed: job.seed,
            generations: outcome.trace.generations(),
            archive_generations: outcome.trace.archive_generations(),
            first_archive_fes: outcome.trace.first_archive_fes(),
        },
    })
}

fn run_guarded(job: &Job<'_>, config: &ExperimentConfig, indicators: &[Indicator], fingerprint: &str) -> Message {
    let failure = |error: String| {
        Message::Failed(FailureRow {
            problem: job.problem.label.clone(),
            algorithm: job.algorithm.label(),
            seed: job.seed,
            error,
        })
    };
    match catch_unwind(AssertUnwindSafe(|| execute(job, config, indicators, fingerprint))) {
        Ok(Ok(record)) => Message::Done(record),
        Ok(Err(e)) => failure(e.to_string()),
        Err(panic) => {
            let text = panic
                .downcast_ref::<&str>()
                .map(|s| (*s).to_owned())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "run panicked".to_owned());
            failure(format!("panic: {text}"))
        }
    }
}

type JobKey = (String, String, u64);

/// Runs every (problem, algorithm, seed) not already complete in
/// `config.output`, persisting rows as they finish. `workers` caps the
/// thread count (`None`: rayon's default).
pub fn run_matrix(config: &ExperimentConfig, workers: Option<usize>) -> Result<MatrixOutcome> {
    config.validate()?;
    let indicators = config.indicators()?;
    let seeds = config.seed_values();
    let fingerprint = config.fingerprint();
    let dir = config.output.as_path();
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;

    if let Some(existing) = Metadata::read(dir)? {
        if existing.fingerprint != fingerprint {
            return Err(HarnessError::FingerprintMismatch {
                dir: dir.to_owned(),
                found: existing.fingerprint,
                expected: fingerprint,
            });
        }
    }
    let prepared = prepare(config)?;
    let metadata = Metadata {
        fingerprint: fingerprint.clone(),
        software: env!("CARGO_PKG_NAME").to_owned(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        seeds: seeds.clone(),
        thresholds: Thresholds::default(),
        problems: prepared
            .iter()
            .map(|p| ProblemInfo {
                label: p.label.clone(),
                n_var: p.problem.n_var(),
                n_obj: p.problem.n_obj(),
                front_points: p.front.len(),
                hv_reference: p.hv_ref.clone(),
            })
            .collect(),
        config: config.clone(),
    };
    metadata.write(dir)?;

    let runs_path = dir.join(RUNS_FILE);
    let traces_path = dir.join(TRACES_FILE);
    let failures_path = dir.join(FAILURES_FILE);
    let complete = completed_jobs(&runs_path, &traces_path, &indicators)?;

    let mut jobs = Vec::new();
    let mut skipped = 0;
    for p in &prepared {
        for a in &config.algorithms {
            for &seed in &seeds {
                if complete.contains(&(p.label.clone(), a.label(), seed)) {
                    skipped += 1;
                } else {
                    jobs.push(Job {
                        problem: p,
                        algorithm: a,
                        seed,
                    });
                }
            }
        }
    }
    drop_partial(&runs_path, &traces_path, &complete)?;
    write_rows::<FailureRow>(&failures_path, &[], &FAILURE_HEADER)?;

    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = workers {
            b = b.num_threads(n);
        }
        b.build()
            .map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))?
    };

    let (tx, rx) = mpsc::channel::<Message>();
    let mut outcome = MatrixOutcome {
        skipped,
        ..MatrixOutcome::default()
    };
    std::thread::scope(|scope| -> Result<()> {
        // Single writer: every row passes through this thread.
        let writer = scope.spawn(|| -> Result<(Vec<RunRecord>, Vec<FailureRow>)> {
            let mut runs = Appender::open(&runs_path, &RUN_HEADER)?;
            let mut traces = Appender::open(&traces_path, &TRACE_HEADER)?;
            let mut failures = Appender::open(&failures_path, &FAILURE_HEADER)?;
            let (mut done, mut failed) = (Vec::new(), Vec::new());
            for msg in rx {
                match msg {
                    Message::Done(record) => {
                        for row in record.rows() {
                            runs.append(&row)?;
                        }
                        traces.append(&record.trace)?;
                        done.push(record);
                    }
                    Message::Failed(row) => {
                        failures.append(&row)?;
                        failed.push(row);
                    }
                }
            }
            Ok((done, failed))
        });
        pool.install(|| {
            jobs.par_iter().for_each_with(tx, |tx, job| {
                let _ = tx.send(run_guarded(job, config, &indicators, &fingerprint));
            });
        });
        let (done, failed) = writer.join().expect("writer thread panicked")?;
        outcome.executed = done;
        outcome.failures = failed;
        Ok(())
    })?;

    canonicalize(dir, config, &indicators, &seeds)?;
    outcome.executed.sort_by_key(|r| order_key(config, &seeds, &r.problem, &r.algorithm, r.seed));
    Ok(outcome)
}

fn completed_jobs(runs_path: &Path, traces_path: &Path, indicators: &[Indicator]) -> Result<HashSet<JobKey>> {
    let rows: Vec<RunRow> = read_rows(runs_path)?;
    let traces: Vec<TraceRow> = read_rows(traces_path)?;
    let traced: HashSet<JobKey> = traces
        .into_iter()
        .map(|t| (t.problem, t.algorithm, t.seed))
        .collect();
    let mut metrics: HashMap<JobKey, HashSet<String>> = HashMap::new();
    for r in rows {
        metrics
            .entry((r.problem, r.algorithm, r.seed))
            .or_default()
            .insert(r.metric);
    }
    Ok(metrics
        .into_iter()
        .filter(|(key, have)| traced.contains(key) && indicators.iter().all(|i| have.contains(i.name())))
        .map(|(key, _)| key)
        .collect())
}

/// Removes rows of jobs that were interrupted part-way.
fn drop_partial(runs_path: &Path, traces_path: &Path, complete: &HashSet<JobKey>) -> Result<()> {
    if runs_path.exists() {
        let rows: Vec<RunRow> = read_rows(runs_path)?;
        let kept: Vec<RunRow> = rows
            .into_iter()
            .filter(|r| complete.contains(&(r.problem.clone(), r.algorithm.clone(), r.seed)))
            .collect();
        write_rows(runs_path, &kept, &RUN_HEADER)?;
    }
    if traces_path.exists() {
        let rows: Vec<TraceRow> = read_rows(traces_path)?;
        let kept: Vec<TraceRow> = rows
            .into_iter()
            .filter(|r| complete.contains(&(r.problem.clone(), r.algorithm.clone(), r.seed)))
            .collect();
        write_rows(traces_path, &kept, &TRACE_HEADER)?;
    }
    Ok(())
}

fn order_key(config: &ExperimentConfig, seeds: &[u64], problem: &str, algorithm: &str, seed: u64) -> (usize, usize, usize) {
    let p = config.problems.iter().position(|e| e.label() == problem);
    let a = config.algorithms.iter().position(|e| e.label() == algorithm);
    let s = seeds.iter().position(|&x| x == seed);
    (p.unwrap_or(usize::MAX), a.unwrap_or(usize::MAX), s.unwrap_or(usize::MAX))
}

/// Rewrites the run and trace files in configuration order.
fn canonicalize(dir: &Path, config: &ExperimentConfig, indicators: &[Indicator], seeds: &[u64]) -> Result<()> {
    let runs_path = dir.join(RUNS_FILE);
    let mut rows: Vec<RunRow> = read_rows(&runs_path)?;
    rows.sort_by_key(|r| {
        let m = indicators.iter().position(|i| i.name() == r.metric).unwrap_or(usize::MAX);
        (order_key(config, seeds, &r.problem, &r.algorithm, r.seed), m)
    });
    write_rows(&runs_path, &rows, &RUN_HEADER)?;
    let traces_path = dir.join(TRACES_FILE);
    let mut traces: Vec<TraceRow> = read_rows(&traces_path)?;
    traces.sort_by_key(|t| order_key(config, seeds, &t.problem, &t.algorithm, t.seed));
    write_rows(&traces_path, &traces, &TRACE_HEADER)
}

//! Command-line interface of the `temof` binary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use temof_core::benchmarks::Family;
use temof_core::metrics::{gd, hv, igd, scaled_nadir, Indicator, HV_DEFAULT_SAMPLES};
use temof_core::{Purpose, RngSeed};

use crate::config::{
    AggregateKind, AlgorithmEntry, AlgorithmKind, ExperimentConfig, ProblemEntry, SeedSpec,
    DEFAULT_HV_REF_FACTOR, DEFAULT_RUNS,
};
use crate::error::{HarnessError, Result};
use crate::records::{read_points, FAILURES_FILE};
use crate::report::{rank_report, summarize, write_ranks, Results};
use crate::runner::{run_matrix, workers_from_env, WORKERS_ENV};

#[derive(Debug, Parser)]
#[command(name = "temof", version, about = "Two-stage co-evolutionary MOEA experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Benchmark problems.
    Bench {
        #[command(subcommand)]
        command: BenchCommand,
    },
    /// Run an experiment matrix.
    #[command(after_help = format!("Set {WORKERS_ENV} to cap the number of worker threads."))]
    Run(RunArgs),
    /// Tables and rankings from a results directory.
    Report {
        #[command(subcommand)]
        command: ReportCommand,
    },
    /// Evaluate one indicator on a front stored as CSV.
    Metric(MetricArgs),
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// List the registered problems with their default dimensions.
    List,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML experiment file; excludes the inline options below.
    #[arg(long, conflicts_with_all = ["problem", "algo"])]
    pub config: Option<PathBuf>,
    /// Problem names (repeat or comma-separate).
    #[arg(long, value_delimiter = ',', required_unless_present = "config")]
    pub problem: Vec<String>,
    /// Algorithms: nsga3, temof-nsga3.
    #[arg(long, value_delimiter = ',', required_unless_present = "config")]
    pub algo: Vec<String>,
    /// Number of independent runs.
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    pub seeds: usize,
    /// Master seed the per-run seeds derive from.
    #[arg(long, default_value_t = 1)]
    pub master_seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub max_fes: u64,
    /// Population size.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Probability of mating from the archive in the second stage.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Fraction of the budget after which the archive may be used.
    #[arg(long, default_value_t = 0.5)]
    pub stage_fraction: f64,
    /// Objective count (problem default when omitted).
    #[arg(long)]
    pub n_obj: Option<usize>,
    /// Decision-variable count (problem default when omitted).
    #[arg(long)]
    pub n_var: Option<usize>,
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "IGD,GD,HV")]
    pub metrics: Vec<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AggregateArg {
    Mean,
    Median,
}

impl From<AggregateArg> for AggregateKind {
    fn from(a: AggregateArg) -> Self {
        match a {
            AggregateArg::Mean => AggregateKind::Mean,
            AggregateArg::Median => AggregateKind::Median,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum ReportCommand {
    /// Mean (std) table with rank-sum marks against a base algorithm.
    Summarize {
        #[arg(long)]
        base: String,
        #[arg(long, default_value = "IGD")]
        metric: String,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value = "results")]
        dir: PathBuf,
        /// Per-problem score for the signed-rank line (defaults to the run's setting).
        #[arg(long, value_enum)]
        aggregate: Option<AggregateArg>,
    },
    /// Friedman mean ranks per metric, written to ranks.csv.
    Ranks {
        #[arg(long, default_value = "results")]
        dir: PathBuf,
        /// Metrics to rank (all recorded metrics when omitted).
        #[arg(long, value_delimiter = ',')]
        metrics: Vec<String>,
        #[arg(long, value_enum)]
        aggregate: Option<AggregateArg>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetricKind {
    Hv,
    Igd,
    Gd,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[arg(value_enum)]
    pub kind: MetricKind,
    /// Solution set, one objective vector per row.
    #[arg(long)]
    pub front: PathBuf,
    /// Reference front (IGD, GD) or reference point (HV). For HV a file with
    /// several rows is read as a front and its nadir scaled by 1.1 is used.
    #[arg(long = "ref")]
    pub reference: PathBuf,
    /// Monte Carlo samples for HV beyond three objectives.
    #[arg(long, default_value_t = HV_DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn parse_metric(name: &str) -> Result<Indicator> {
    Indicator::from_name(name)
        .ok_or_else(|| HarnessError::Config(format!("unknown metric `{name}` (expected IGD, GD or HV)")))
}

impl RunArgs {
    pub fn to_config(&self) -> Result<ExperimentConfig> {
        if let Some(path) = &self.config {
            return ExperimentConfig::load(path);
        }
        let problems = self
            .problem
            .iter()
            .map(|name| ProblemEntry {
                n_obj: self.n_obj,
                n_var: self.n_var,
                ..ProblemEntry::named(name)
            })
            .collect();
        let algorithms = self
            .algo
            .iter()
            .map(|name| {
                let kind = AlgorithmKind::from_name(name).ok_or_else(|| {
                    HarnessError::Config(format!("unknown algorithm `{name}` (expected nsga3 or temof-nsga3)"))
                })?;
                let mut entry = AlgorithmEntry::of_kind(kind);
                if kind == AlgorithmKind::TemofNsga3 {
                    entry.p = Some(self.p);
                    entry.stage_fraction = Some(self.stage_fraction);
                }
                Ok(entry)
            })
            .collect::<Result<_>>()?;
        let mut cfg = ExperimentConfig::new(problems, algorithms);
        cfg.seeds = SeedSpec::Derived {
            master: self.master_seed,
            runs: self.seeds,
        };
        cfg.max_fes = self.max_fes;
        cfg.population_size = self.n;
        cfg.output = self.out.clone();
        cfg.metrics = self.metrics.clone();
        Ok(cfg)
    }
}

pub fn bench_list() -> String {
    let mut s = format!("{:<8} {:>5} {:>5}\n", "name", "n_obj", "n_var");
    for f in Family::ALL {
        let m = f.default_n_obj();
        let _ = writeln!(s, "{:<8} {:>5} {:>5}", f.name(), m, f.default_n_var(m));
    }
    s
}

pub fn run(args: &RunArgs) -> Result<String> {
    let cfg = args.to_config()?;
    let outcome = run_matrix(&cfg, workers_from_env()?)?;
    let mut s = format!(
        "{} runs executed, {} already complete, {} failed; results in {}\n",
        outcome.executed.len(),
        outcome.skipped,
        outcome.failures.len(),
        cfg.output.display()
    );
    if !outcome.failures.is_empty() {
        for f in &outcome.failures {
            let _ = writeln!(s, "  {} / {} / seed {}: {}", f.problem, f.algorithm, f.seed, f.error);
        }
        return Err(HarnessError::Report(format!(
            "{s}{} runs failed; details in {}",
            outcome.failures.len(),
            cfg.output.join(FAILURES_FILE).display()
        )));
    }
    Ok(s)
}

pub fn report_summarize(
    dir: &Path,
    base: &str,
    metric: &str,
    alpha: f64,
    aggregate: Option<AggregateKind>,
) -> Result<String> {
    let results = Results::load(dir)?;
    let aggregate = aggregate.map(Into::into).unwrap_or_else(|| results.aggregate());
    let table = summarize(&results, parse_metric(metric)?, base, alpha, aggregate)?;
    let (md, csv) = table.write(dir)?;
    Ok(format!(
        "{}\nwritten: {}, {}\n",
        table.to_markdown(),
        md.display(),
        csv.display()
    ))
}

pub fn report_ranks(dir: &Path, metrics: &[String], aggregate: Option<AggregateKind>) -> Result<String> {
    let results = Results::load(dir)?;
    let aggregate = aggregate.map(Into::into).unwrap_or_else(|| results.aggregate());
    let metrics = if metrics.is_empty() {
        results.metrics()
    } else {
        metrics.iter().map(|m| parse_metric(m)).collect::<Result<_>>()?
    };
    let rows = rank_report(&results, &metrics, aggregate)?;
    let path = write_ranks(dir, &rows)?;
    let mut s = String::new();
    for r in &rows {
        let _ = writeln!(
            s,
            "{:<4} {:<16} {:.3} (chi2 {:.3}, {} problems)",
            r.metric, r.algorithm, r.mean_rank, r.chi_square, r.n_problems
        );
    }
    let _ = writeln!(s, "written: {}", path.display());
    Ok(s)
}

pub fn metric(args: &MetricArgs) -> Result<String> {
    let front = read_points(&args.front)?;
    let reference = read_points(&args.reference)?;
    let value = match args.kind {
        MetricKind::Igd => igd(&front, &reference)?.value,
        MetricKind::Gd => gd(&front, &reference)?.value,
        MetricKind::Hv => {
            let point = if reference.len() == 1 {
                reference[0].clone()
            } else {
                scaled_nadir(&reference, DEFAULT_HV_REF_FACTOR)?
            };
            let mut rng = RngSeed::new(args.seed).stream(Purpose::MonteCarlo);
            hv(&front, &point, args.samples, &mut rng)?.value
        }
    };
    Ok(format!("{value}\n"))
}

pub fn dispatch(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Bench {
            command: BenchCommand::List,
        } => Ok(bench_list()),
        Command::Run(args) => run(&args),
        Command::Report { command } => match command {
            ReportCommand::Summarize {
                base,
                metric,
                alpha,
                dir,
                aggregate,
            } => report_summarize(&dir, &base, &metric, alpha, aggregate.map(Into::into)),
            ReportCommand::Ranks {
                dir,
                metrics,
                aggregate,
            } => report_ranks(&dir, &metrics, aggregate.map(Into::into)),
        },
        Command::Metric(args) => metric(&args),
    }
}

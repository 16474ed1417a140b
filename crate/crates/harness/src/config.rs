//! Experiment configuration: the TOML schema and its resolved form.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use temof_core::benchmarks::{make_problem, Benchmark, Family};
use temof_core::metrics::{Indicator, HV_DEFAULT_SAMPLES};
use temof_core::stats::Aggregate;
use temof_core::temof::FrameworkConfig;
use temof_core::variation::VariationParams;
use temof_core::RngSeed;

use crate::error::HarnessError;

pub const DEFAULT_RUNS: usize = 20;
pub const DEFAULT_FRONT_SAMPLES: usize = 10_000;
pub const DEFAULT_HV_REF_FACTOR: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgorithmKind {
    #[serde(rename = "nsga3")]
    Nsga3,
    #[serde(rename = "temof-nsga3")]
    TemofNsga3,
}

impl AlgorithmKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::Nsga3 => "nsga3",
            AlgorithmKind::TemofNsga3 => "temof-nsga3",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [AlgorithmKind::Nsga3, AlgorithmKind::TemofNsga3]
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(name))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_obj: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_var: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl ProblemEntry {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_owned(),
            n_obj: None,
            n_var: None,
            label: None,
        }
    }

    fn family(&self) -> Result<Family, HarnessError> {
        Family::from_name(&self.name)
            .ok_or_else(|| HarnessError::Config(format!("unknown problem `{}`", self.name)))
    }

    pub fn n_obj(&self) -> Result<usize, HarnessError> {
        Ok(self.n_obj.unwrap_or(self.family()?.default_n_obj()))
    }

    pub fn label(&self) -> String {
        match (&self.label, self.family()) {
            (Some(l), _) => l.clone(),
            (None, Ok(f)) => f.name().to_owned(),
            (None, Err(_)) => self.name.clone(),
        }
    }

    pub fn build(&self) -> Result<Benchmark, HarnessError> {
        Ok(make_problem(&self.name, self.n_var, self.n_obj()?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmEntry {
    pub kind: AlgorithmKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub use_archive: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossover_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossover_eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation_eta: Option<f64>,
}

impl AlgorithmEntry {
    pub fn of_kind(kind: AlgorithmKind) -> Self {
        Self {
            kind,
            label: None,
            p: None,
            stage_fraction: None,
            use_archive: None,
            crossover_prob: None,
            crossover_eta: None,
            mutation_prob: None,
            mutation_eta: None,
        }
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.kind.name().to_owned())
    }

    pub fn framework(&self, population_size: usize, max_fes: u64) -> FrameworkConfig {
        let d = FrameworkConfig::default();
        FrameworkConfig {
            population_size,
            max_fes,
            archive_prob: self.p.unwrap_or(d.archive_prob),
            stage_fraction: self.stage_fraction.unwrap_or(d.stage_fraction),
            use_archive: self.use_archive.unwrap_or(d.use_archive),
        }
    }

    pub fn variation(&self) -> VariationParams {
        let d = VariationParams::default();
        VariationParams {
            crossover_prob: self.crossover_prob.unwrap_or(d.crossover_prob),
            crossover_eta: self.crossover_eta.unwrap_or(d.crossover_eta),
            mutation_prob: self.mutation_prob.or(d.mutation_prob),
            mutation_eta: self.mutation_eta.unwrap_or(d.mutation_eta),
        }
    }
}

/// Either an explicit seed list or `runs` seeds derived from `master`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    List(Vec<u64>),
    Derived { master: u64, runs: usize },
}

impl Default for SeedSpec {
    fn default() -> Self {
        SeedSpec::Derived {
            master: 1,
            runs: DEFAULT_RUNS,
        }
    }
}

impl SeedSpec {
    /// The seed values handed to `RngSeed::new` for each run.
    pub fn resolve(&self) -> Vec<u64> {
        match self {
            SeedSpec::List(v) => v.clone(),
            SeedSpec::Derived { master, runs } => (0..*runs as u64)
                .map(|i| RngSeed::new(*master).for_run(i).value())
                .collect(),
        }
    }
}

/// Which solution set the indicators are computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndicatorTarget {
    /// The whole final population.
    #[default]
    Population,
    /// Only the non-dominated members of the final population.
    Nondominated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregateKind {
    #[default]
    Mean,
    Median,
}

impl From<AggregateKind> for Aggregate {
    fn from(k: AggregateKind) -> Self {
        match k {
            AggregateKind::Mean => Aggregate::Mean,
            AggregateKind::Median => Aggregate::Median,
        }
    }
}

fn default_population_size() -> usize {
    100
}
fn default_max_fes() -> u64 {
    100_000
}
fn default_metrics() -> Vec<String> {
    Indicator::ALL.iter().map(|i| i.name().to_owned()).collect()
}
fn default_output() -> PathBuf {
    PathBuf::from("results")
}
fn default_front_samples() -> usize {
    DEFAULT_FRONT_SAMPLES
}
fn default_hv_samples() -> usize {
    HV_DEFAULT_SAMPLES
}
fn default_hv_ref_factor() -> f64 {
    DEFAULT_HV_REF_FACTOR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problems: Vec<ProblemEntry>,
    pub algorithms: Vec<AlgorithmEntry>,
    #[serde(default)]
    pub seeds: SeedSpec,
    #[serde(default = "default_population_size")]
    pub population_size: usize,
    #[serde(default = "default_max_fes")]
    pub max_fes: u64,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<String>,
    /// Not part of the fingerprint.
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub target: IndicatorTarget,
    #[serde(default = "default_front_samples")]
    pub front_samples: usize,
    #[serde(default = "default_hv_samples")]
    pub hv_samples: usize,
    /// HV reference point = factor x nadir of the sampled true front.
    #[serde(default = "default_hv_ref_factor")]
    pub hv_ref_factor: f64,
    #[serde(default)]
    pub aggregate: AggregateKind,
}

impl ExperimentConfig {
    pub fn new(problems: Vec<ProblemEntry>, algorithms: Vec<AlgorithmEntry>) -> Self {
        Self {
            problems,
            algorithms,
            seeds: SeedSpec::default(),
            population_size: default_population_size(),
            max_fes: default_max_fes(),
            metrics: default_metrics(),
            output: default_output(),
            target: IndicatorTarget::default(),
            front_samples: default_front_samples(),
            hv_samples: default_hv_samples(),
            hv_ref_factor: default_hv_ref_factor(),
            aggregate: AggregateKind::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        // A relative output directory is taken relative to the config file.
        if cfg.output.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.output = dir.join(&cfg.output);
            }
        }
        Ok(cfg)
    }

    pub fn indicators(&self) -> Result<Vec<Indicator>, HarnessError> {
        self.metrics
            .iter()
            .map(|m| {
                Indicator::from_name(m)
                    .ok_or_else(|| HarnessError::Config(format!("unknown metric `{m}` (expected IGD, GD or HV)")))
            })
            .collect()
    }

    pub fn seed_values(&self) -> Vec<u64> {
        self.seeds.resolve()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.problems.is_empty() {
            return bad("at least one problem is required".into());
        }
        if self.algorithms.is_empty() {
            return bad("at least one algorithm is required".into());
        }
        let seeds = self.seed_values();
        if seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if seeds.iter().collect::<HashSet<_>>().len() != seeds.len() {
            return bad("seed list contains duplicates".into());
        }
        if self.metrics.is_empty() {
            return bad("at least one metric is required".into());
        }
        let indicators = self.indicators()?;
        if indicators.iter().collect::<HashSet<_>>().len() != indicators.len() {
            return bad("metric list contains duplicates".into());
        }
        if self.front_samples == 0 || self.hv_samples == 0 {
            return bad("front_samples and hv_samples must be positive".into());
        }
        if !(self.hv_ref_factor.is_finite() && self.hv_ref_factor >= 1.0) {
            return bad(format!("hv_ref_factor {} must be at least 1", self.hv_ref_factor));
        }
        let mut labels = HashSet::new();
        for p in &self.problems {
            p.build()?;
            if !labels.insert(p.label()) {
                return bad(format!("duplicate problem label `{}`; set `label`", p.label()));
            }
        }
        let mut labels = HashSet::new();
        for a in &self.algorithms {
            a.framework(self.population_size, self.max_fes).validate()?;
            a.variation().validate()?;
            if !labels.insert(a.label()) {
                return bad(format!("duplicate algorithm label `{}`; set `label`", a.label()));
            }
        }
        Ok(())
    }

    /// SHA-256 over everything that influences indicator values.
    pub fn fingerprint(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = PathBuf::new();
        let json = serde_json::to_string(&canonical).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(env!("CARGO_PKG_VERSION").as_bytes());
        hasher.update([0]);
        hasher.update(json.as_bytes());
        hex::encode(hasher.finalize())
    }
}

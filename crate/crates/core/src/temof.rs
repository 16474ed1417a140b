//! The two-stage co-evolutionary driver.
//!
//! One generation of [`temof_run`]:
//!
//! 1. pick the mating source with [`stage_gate`]: the archive only once
//!    `FEs >= stage_fraction * maxFEs` and a uniform draw falls below `p`;
//! 2. breed `N` offspring from that source;
//! 3. `Pop = EnvironmentalSelection(Population + Off, N)`;
//! 4. `Archive = FirstFrontSelection(Archive + Off, N)`;
//! 5. `Population = EnvironmentalSelection(dedupe(Pop + Archive), N)`.
//!
//! The loop runs while `FEs <= maxFEs`, checked before each generation, so
//! the last generation may overshoot the budget by up to `N` evaluations.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::population::{initialize_population, merge_dedupe, Population, RunBudget};
use crate::problem::Problem;
use crate::rng::{Purpose, RngSeed, StreamRng};
use crate::variation::{generate_offspring, VariationParams};

/// The survival-selection pair a base MOEA plugs into the framework.
pub trait SurvivalSelection {
    /// Truncates `pop` to `min(n, |pop|)` members balancing convergence and
    /// diversity.
    fn environmental_selection(
        &mut self,
        pop: Population,
        n: usize,
        rng: &mut StreamRng,
    ) -> Result<Population>;

    /// Keeps only the first non-dominated front of `pop`, at most `n` members.
    fn first_front_selection(
        &mut self,
        pop: Population,
        n: usize,
        rng: &mut StreamRng,
    ) -> Result<Population>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameworkConfig {
    pub population_size: usize,
    pub max_fes: u64,
    /// Probability of mating from the archive in the second stage.
    pub archive_prob: f64,
    /// Fraction of `max_fes` after which the archive may be used.
    pub stage_fraction: f64,
    /// Disables the archive entirely (ablation).
    pub use_archive: bool,
}

impl Default for FrameworkConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            max_fes: 100_000,
            archive_prob: 0.5,
            stage_fraction: 0.5,
            use_archive: true,
        }
    }
}

impl FrameworkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::config("population size must be at least 2"));
        }
        if !(0.0..=1.0).contains(&self.archive_prob) {
            return Err(Error::config(format!(
                "archive probability {} outside [0, 1]",
                self.archive_prob
            )));
        }
        if !(self.stage_fraction > 0.0 && self.stage_fraction < 1.0) {
            return Err(Error::config(format!(
                "stage fraction {} outside (0, 1)",
                self.stage_fraction
            )));
        }
        if self.max_fes < self.population_size as u64 {
            return Err(Error::config(format!(
                "budget {} is smaller than the population size {}",
                self.max_fes, self.population_size
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatingSource {
    FromPopulation,
    FromArchive,
}

/// Mating source for one generation; `u` is uniform in `[0, 1)`.
pub fn stage_gate(fes: u64, max_fes: u64, p: f64, stage_fraction: f64, u: f64) -> MatingSource {
    if fes as f64 >= stage_fraction * max_fes as f64 && u < p {
        MatingSource::FromArchive
    } else {
        MatingSource::FromPopulation
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    /// FEs when the mating source was chosen.
    pub fes: u64,
    pub source: MatingSource,
    /// FEs after the generation's offspring were evaluated.
    pub fes_after: u64,
    pub population_size: usize,
    pub archive_size: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    records: Vec<GenerationRecord>,
}

impl RunTrace {
    pub fn records(&self) -> &[GenerationRecord] {
        &self.records
    }

    pub fn generations(&self) -> usize {
        self.records.len()
    }

    pub fn archive_generations(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.source == MatingSource::FromArchive)
            .count()
    }

    /// FEs of the first generation that mated from the archive.
    pub fn first_archive_fes(&self) -> Option<u64> {
        self.records
            .iter()
            .find(|r| r.source == MatingSource::FromArchive)
            .map(|r| r.fes)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub population: Population,
    /// `None` when the archive is disabled.
    pub archive: Option<Population>,
    pub trace: RunTrace,
    pub fes: u64,
}

/// State handed to an observer after every generation.
#[derive(Debug, Clone, Copy)]
pub struct GenerationView<'a> {
    pub record: &'a GenerationRecord,
    pub population: &'a Population,
    pub archive: Option<&'a Population>,
}

struct Streams {
    init: StreamRng,
    variation: StreamRng,
    selection: StreamRng,
    gate: StreamRng,
}

impl Streams {
    fn new(seed: RngSeed) -> Self {
        Self {
            init: seed.stream(Purpose::Initialization),
            variation: seed.stream(Purpose::Variation),
            selection: seed.stream(Purpose::Selection),
            gate: seed.stream(Purpose::Gate),
        }
    }
}

/// Runs the two-stage framework around `selection`.
pub fn temof_run<S: SurvivalSelection>(
    problem: &dyn Problem,
    config: &FrameworkConfig,
    variation: &VariationParams,
    selection: &mut S,
    seed: RngSeed,
    mut observer: impl FnMut(&GenerationView<'_>),
) -> Result<RunOutcome> {
    config.validate()?;
    variation.validate()?;
    let n = config.population_size;
    let mut rngs = Streams::new(seed);
    let mut budget = RunBudget::new(config.max_fes)?;
    let mut population = initialize_population(problem, n, &mut budget, &mut rngs.init)?;
    let mut archive = config.use_archive.then(|| population.clone());
    let mut trace = RunTrace::default();

    while budget.has_remaining() {
        let fes = budget.fes();
        let u: f64 = rngs.gate.random();
        let source = match archive {
            Some(_) => stage_gate(fes, config.max_fes, config.archive_prob, config.stage_fraction, u),
            None => MatingSource::FromPopulation,
        };
        let parents = match (source, &archive) {
            (MatingSource::FromArchive, Some(arc)) => arc,
            _ => &population,
        };
        let offspring = generate_offspring(
            parents,
            n,
            variation,
            problem,
            &mut budget,
            &mut rngs.variation,
        )?;

        let pop = selection.environmental_selection(
            population.concat(offspring.clone()),
            n,
            &mut rngs.selection,
        )?;
        population = match archive.take() {
            Some(arc) => {
                let arc = selection.first_front_selection(
                    arc.concat(offspring),
                    n,
                    &mut rngs.selection,
                )?;
                let merged = merge_dedupe(pop.clone(), arc.clone())?;
                archive = Some(arc);
                if merged.len() >= n {
                    selection.environmental_selection(merged, n, &mut rngs.selection)?
                } else {
                    restore_duplicates(merged, &pop, n)
                }
            }
            None => pop,
        };

        let record = GenerationRecord {
            generation: trace.records.len() + 1,
            fes,
            source,
            fes_after: budget.fes(),
            population_size: population.len(),
            archive_size: archive.as_ref().map(Population::len),
        };
        trace.records.push(record);
        observer(&GenerationView {
            record: &record,
            population: &population,
            archive: archive.as_ref(),
        });
    }

    Ok(RunOutcome {
        population,
        archive,
        trace,
        fes: budget.fes(),
    })
}

/// When deduplication leaves fewer than `n` members, the copies removed
/// from `pop` are appended again (in `pop` order) so the population keeps
/// its size.
fn restore_duplicates(mut merged: Population, pop: &Population, n: usize) -> Population {
    let mut seen = alloc::collections::BTreeSet::new();
    for m in pop {
        if merged.len() >= n {
            break;
        }
        if !seen.insert(m.decision_key()) {
            merged.push(m.clone());
        }
    }
    merged
}

/// The plain base algorithm: `Population = EnvironmentalSelection(Population
/// + Off, N)` every generation, no archive. Uses the same streams as
/// [`temof_run`] so both start from the same initial population.
pub fn baseline_run<S: SurvivalSelection>(
    problem: &dyn Problem,
    config: &FrameworkConfig,
    variation: &VariationParams,
    selection: &mut S,
    seed: RngSeed,
    mut observer: impl FnMut(&GenerationView<'_>),
) -> Result<RunOutcome> {
    config.validate()?;
    variation.validate()?;
    let n = config.population_size;
    let mut rngs = Streams::new(seed);
    let mut budget = RunBudget::new(config.max_fes)?;
    let mut population = initialize_population(problem, n, &mut budget, &mut rngs.init)?;
    let mut trace = RunTrace::default();

    while budget.has_remaining() {
        let fes = budget.fes();
        let offspring = generate_offspring(
            &population,
            n,
            variation,
            problem,
            &mut budget,
            &mut rngs.variation,
        )?;
        population = selection.environmental_selection(
            population.concat(offspring),
            n,
            &mut rngs.selection,
        )?;
        let record = GenerationRecord {
            generation: trace.records.len() + 1,
            fes,
            source: MatingSource::FromPopulation,
            fes_after: budget.fes(),
            population_size: population.len(),
            archive_size: None,
        };
        trace.records.push(record);
        observer(&GenerationView {
            record: &record,
            population: &population,
            archive: None,
        });
    }

    Ok(RunOutcome {
        population,
        archive: None,
        trace,
        fes: budget.fes(),
    })
}

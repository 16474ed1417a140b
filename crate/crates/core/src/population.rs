//! Individuals, populations and evaluation accounting.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::rng::StreamRng;

/// A candidate solution. Objectives are present iff it has been evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    decision: Vec<f64>,
    objectives: Option<Vec<f64>>,
}

impl Individual {
    pub fn new(decision: Vec<f64>) -> Self {
        Self {
            decision,
            objectives: None,
        }
    }

    pub fn evaluated(decision: Vec<f64>, objectives: Vec<f64>) -> Self {
        Self {
            decision,
            objectives: Some(objectives),
        }
    }

    pub fn decision(&self) -> &[f64] {
        &self.decision
    }

    pub fn objectives(&self) -> Option<&[f64]> {
        self.objectives.as_deref()
    }

    pub fn is_evaluated(&self) -> bool {
        self.objectives.is_some()
    }

    pub(crate) fn decision_key(&self) -> Vec<u64> {
        self.decision.iter().map(|v| v.to_bits()).collect()
    }
}

/// Ordered multiset of individuals.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Population {
    members: Vec<Individual>,
}

impl Population {
    pub fn new(members: Vec<Individual>) -> Self {
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Individual> {
        self.members
    }

    pub fn get(&self, i: usize) -> Option<&Individual> {
        self.members.get(i)
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Individual> {
        self.members.iter()
    }

    pub fn push(&mut self, ind: Individual) {
        self.members.push(ind);
    }

    /// Concatenation `self ++ other`, duplicates kept.
    pub fn concat(mut self, other: Population) -> Population {
        self.members.extend(other.members);
        self
    }

    /// Members at `indices`, in the order given.
    pub fn select(&self, indices: &[usize]) -> Population {
        Population::new(indices.iter().map(|&i| self.members[i].clone()).collect())
    }

    /// Objective vectors of all members; fails if any member is unevaluated.
    pub fn objectives(&self) -> Result<Vec<&[f64]>> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, m)| {
                m.objectives()
                    .ok_or_else(|| Error::usage(format!("member {i} has not been evaluated")))
            })
            .collect()
    }

    fn dims(&self) -> Option<(usize, Option<usize>)> {
        self.members
            .first()
            .map(|m| (m.decision.len(), m.objectives.as_ref().map(Vec::len)))
    }

    fn check_uniform_dims(&self, dims: (usize, Option<usize>)) -> Result<()> {
        for m in &self.members {
            if m.decision.len() != dims.0 {
                return Err(Error::config(format!(
                    "decision dimension mismatch: {} vs {}",
                    m.decision.len(),
                    dims.0
                )));
            }
            if let (Some(obj), Some(expected)) = (&m.objectives, dims.1) {
                if obj.len() != expected {
                    return Err(Error::config(format!(
                        "objective dimension mismatch: {} vs {expected}",
                        obj.len()
                    )));
                }
            }
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a Population {
    type Item = &'a Individual;
    type IntoIter = core::slice::Iter<'a, Individual>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

impl FromIterator<Individual> for Population {
    fn from_iter<T: IntoIterator<Item = Individual>>(iter: T) -> Self {
        Population::new(iter.into_iter().collect())
    }
}

/// Function-evaluation counter. `fes` only grows; it may end above
/// `max_fes` because the driver checks the budget after each generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunBudget {
    max_fes: u64,
    fes: u64,
}

impl RunBudget {
    pub fn new(max_fes: u64) -> Result<Self> {
        if max_fes == 0 {
            return Err(Error::config("maxFEs must be positive"));
        }
        Ok(Self { max_fes, fes: 0 })
    }

    pub fn max_fes(&self) -> u64 {
        self.max_fes
    }

    pub fn fes(&self) -> u64 {
        self.fes
    }

    /// The main loop keeps going while this is true (`FEs <= maxFEs`).
    pub fn has_remaining(&self) -> bool {
        self.fes <= self.max_fes
    }

    fn charge(&mut self, n: u64) {
        self.fes += n;
    }
}

/// `n` individuals drawn uniformly inside the problem bounds, evaluated.
pub fn initialize_population(
    problem: &dyn Problem,
    n: usize,
    budget: &mut RunBudget,
    rng: &mut StreamRng,
) -> Result<Population> {
    if n == 0 {
        return Err(Error::config("population size must be at least 1"));
    }
    let bounds = problem.bounds();
    let mut pop: Population = (0..n)
        .map(|_| {
            let x = (0..bounds.dim())
                .map(|i| {
                    let (lo, hi) = (bounds.lower()[i], bounds.upper()[i]);
                    bounds.clamp(i, lo + rng.random::<f64>() * (hi - lo))
                })
                .collect();
            Individual::new(x)
        })
        .collect();
    evaluate_all(&mut pop, problem, budget)?;
    Ok(pop)
}

/// Evaluates every unevaluated member and charges one FE per evaluation.
pub fn evaluate_all(
    pop: &mut Population,
    problem: &dyn Problem,
    budget: &mut RunBudget,
) -> Result<()> {
    let n_obj = problem.n_obj();
    for m in pop.members.iter_mut().filter(|m| !m.is_evaluated()) {
        if m.decision.len() != problem.n_var() {
            return Err(Error::config(format!(
                "{}: expected {} decision variables, got {}",
                problem.name(),
                problem.n_var(),
                m.decision.len()
            )));
        }
        let f = problem.evaluate(&m.decision);
        budget.charge(1);
        if f.len() != n_obj {
            return Err(Error::Evaluation {
                problem: problem.name().to_string(),
                input: m.decision.clone(),
                detail: format!("expected {n_obj} objectives, got {}", f.len()),
            });
        }
        if let Some(bad) = f.iter().find(|v| !v.is_finite()) {
            return Err(Error::Evaluation {
                problem: problem.name().to_string(),
                input: m.decision.clone(),
                detail: format!("non-finite objective value {bad}"),
            });
        }
        m.objectives = Some(f);
    }
    Ok(())
}

/// Union of `a` and `b` without duplicate decision vectors (exact bit
/// equality). The first occurrence wins, scanning `a` then `b`.
pub fn merge_dedupe(a: Population, b: Population) -> Result<Population> {
    if let Some(dims) = a.dims().or_else(|| b.dims()) {
        a.check_uniform_dims(dims)?;
        b.check_uniform_dims(dims)?;
    }
    let mut seen = BTreeSet::new();
    Ok(a
        .members
        .into_iter()
        .chain(b.members)
        .filter(|m| seen.insert(m.decision_key()))
        .collect())
}

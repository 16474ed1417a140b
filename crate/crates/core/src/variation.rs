//! Random mating, simulated binary crossover and polynomial mutation.

use alloc::format;
use alloc::vec::Vec;

use libm::pow;
use rand::Rng;

use crate::error::{Error, Result};
use crate::population::{evaluate_all, Individual, Population, RunBudget};
use crate::problem::{Bounds, Problem};
use crate::rng::StreamRng;

/// Operator settings. `mutation_prob = None` means `1 / n_var`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationParams {
    pub crossover_prob: f64,
    pub crossover_eta: f64,
    pub mutation_prob: Option<f64>,
    pub mutation_eta: f64,
}

impl Default for VariationParams {
    fn default() -> Self {
        Self {
            crossover_prob: 1.0,
            crossover_eta: 20.0,
            mutation_prob: None,
            mutation_eta: 20.0,
        }
    }
}

impl VariationParams {
    pub fn validate(&self) -> Result<()> {
        let prob_ok = |p: f64| (0.0..=1.0).contains(&p);
        if !prob_ok(self.crossover_prob) {
            return Err(Error::config(format!(
                "crossover probability {} outside [0, 1]",
                self.crossover_prob
            )));
        }
        if let Some(pm) = self.mutation_prob {
            if !prob_ok(pm) {
                return Err(Error::config(format!(
                    "mutation probability {pm} outside [0, 1]"
                )));
            }
        }
        if [self.crossover_eta, self.mutation_eta]
            .iter()
            .any(|eta| eta.is_nan() || *eta <= 0.0)
        {
            return Err(Error::config("distribution indices must be positive"));
        }
        Ok(())
    }

    pub fn mutation_prob_for(&self, n_var: usize) -> f64 {
        self.mutation_prob.unwrap_or(1.0 / n_var as f64)
    }
}

/// `ceil(n / 2)` parent index pairs drawn uniformly with replacement from a
/// source of `source_len` members.
pub fn mating_pool(source_len: usize, n: usize, rng: &mut StreamRng) -> Result<Vec<(usize, usize)>> {
    if source_len == 0 {
        return Err(Error::usage("mating source is empty"));
    }
    Ok((0..n.div_ceil(2))
        .map(|_| {
            (
                rng.random_range(0..source_len),
                rng.random_range(0..source_len),
            )
        })
        .collect())
}

/// Children of one SBX step with random number `u` in `[0, 1)`, before any
/// clamping. The children are symmetric around the parents' midpoint.
pub fn sbx_spread(p1: f64, p2: f64, u: f64, eta: f64) -> (f64, f64) {
    let beta = if u <= 0.5 {
        pow(2.0 * u, 1.0 / (eta + 1.0))
    } else {
        pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0))
    };
    (
        0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2),
        0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2),
    )
}

/// Simulated binary crossover. Each variable is crossed with probability
/// `crossover_prob`; children are clamped to `bounds`.
pub fn sbx_crossover(
    p1: &[f64],
    p2: &[f64],
    params: &VariationParams,
    bounds: &Bounds,
    rng: &mut StreamRng,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if p1.len() != p2.len() || p1.len() != bounds.dim() {
        return Err(Error::config(format!(
            "crossover dimension mismatch ({}, {}, bounds {})",
            p1.len(),
            p2.len(),
            bounds.dim()
        )));
    }
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for i in 0..p1.len() {
        if rng.random::<f64>() >= params.crossover_prob || p1[i] == p2[i] {
            continue;
        }
        let (a, b) = sbx_spread(p1[i], p2[i], rng.random(), params.crossover_eta);
        c1[i] = bounds.clamp(i, a);
        c2[i] = bounds.clamp(i, b);
    }
    Ok((c1, c2))
}

/// Bounded polynomial mutation; each variable mutates with probability `prob`.
pub fn polynomial_mutation(
    x: &[f64],
    prob: f64,
    eta: f64,
    bounds: &Bounds,
    rng: &mut StreamRng,
) -> Vec<f64> {
    let mut y = x.to_vec();
    let exponent = 1.0 / (eta + 1.0);
    for (i, v) in y.iter_mut().enumerate() {
        if rng.random::<f64>() >= prob {
            continue;
        }
        let (lo, hi) = (bounds.lower()[i], bounds.upper()[i]);
        let span = hi - lo;
        let r: f64 = rng.random();
        let delta = if r < 0.5 {
            let xy = 1.0 - (*v - lo) / span;
            let val = 2.0 * r + (1.0 - 2.0 * r) * pow(xy, eta + 1.0);
            pow(val, exponent) - 1.0
        } else {
            let xy = 1.0 - (hi - *v) / span;
            let val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * pow(xy, eta + 1.0);
            1.0 - pow(val, exponent)
        };
        *v = bounds.clamp(i, *v + delta * span);
    }
    y
}

/// Produces exactly `n` evaluated offspring from `source`.
pub fn generate_offspring(
    source: &Population,
    n: usize,
    params: &VariationParams,
    problem: &dyn Problem,
    budget: &mut RunBudget,
    rng: &mut StreamRng,
) -> Result<Population> {
    let bounds = problem.bounds();
    let pm = params.mutation_prob_for(bounds.dim());
    let pairs = mating_pool(source.len(), n, rng)?;
    let mut children = Vec::with_capacity(2 * pairs.len());
    for (a, b) in pairs {
        let (c1, c2) = sbx_crossover(
            source.members()[a].decision(),
            source.members()[b].decision(),
            params,
            bounds,
            rng,
        )?;
        children.push(polynomial_mutation(&c1, pm, params.mutation_eta, bounds, rng));
        children.push(polynomial_mutation(&c2, pm, params.mutation_eta, bounds, rng));
    }
    children.truncate(n);
    let mut offspring: Population = children.into_iter().map(Individual::new).collect();
    evaluate_all(&mut offspring, problem, budget)?;
    Ok(offspring)
}

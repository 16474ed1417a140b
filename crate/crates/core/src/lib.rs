//! Two-stage evolutionary framework for multi-objective optimization.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the search
//! machinery (Pareto dominance, real-coded variation, NSGA-III survival
//! selection and the two-stage driver), a set of DTLZ/ZDT benchmark problems
//! with analytic Pareto fronts, quality indicators (IGD, GD, hypervolume) and
//! the nonparametric tests used to compare algorithms.
//!
//! Everything random is driven by [`rng::RngSeed`] substreams, so a run is a
//! pure function of its seed and configuration.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod benchmarks;
pub mod dominance;
pub mod error;
pub mod metrics;
pub mod nsga3;
pub mod population;
pub mod problem;
pub mod rng;
pub mod stats;
pub mod temof;
pub mod variation;

pub use error::{Error, Result};
pub use population::{Individual, Population, RunBudget};
pub use problem::{Bounds, Problem};
pub use rng::{Purpose, RngSeed, StreamRng};

//! Experiment harness around `temof-core`: TOML configs, a parallel run
//! matrix with resumable CSV output, comparison tables and Friedman ranks.

pub mod cli;
pub mod config;
pub mod error;
pub mod records;
pub mod report;
pub mod runner;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use runner::{run_matrix, MatrixOutcome, RunRecord};

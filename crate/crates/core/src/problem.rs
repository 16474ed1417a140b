use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Box constraints of a decision space. `lower[i] < upper[i]` for every `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::config(format!(
                "bound vectors differ in length ({} vs {})",
                lower.len(),
                upper.len()
            )));
        }
        if lower.is_empty() {
            return Err(Error::config("decision dimension must be positive"));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if lo.partial_cmp(hi) != Some(core::cmp::Ordering::Less)
                || !lo.is_finite()
                || !hi.is_finite()
            {
                return Err(Error::config(format!(
                    "invalid bounds for variable {i}: [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// `[lo, hi]` for every one of `n` variables.
    pub fn uniform(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(alloc::vec![lo; n], alloc::vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    pub fn clamp(&self, i: usize, v: f64) -> f64 {
        v.max(self.lower[i]).min(self.upper[i])
    }
}

/// A box-constrained multi-objective minimization problem.
///
/// `evaluate` must be deterministic. Implementations only need to report
/// values; the caller checks finiteness and dimensions.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;

    fn n_obj(&self) -> usize;

    fn bounds(&self) -> &Bounds;

    fn n_var(&self) -> usize {
        self.bounds().dim()
    }

    fn evaluate(&self, x: &[f64]) -> Vec<f64>;

    /// Deterministic sample of (about) `count` points of the true Pareto front.
    fn sample_front(&self, count: usize) -> Result<Vec<Vec<f64>>> {
        let _ = count;
        Err(Error::Unsupported(format!(
            "{} has no analytic Pareto front",
            self.name()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inverted_bounds() {
        assert!(matches!(
            Bounds::new(alloc::vec![0.0, 1.0], alloc::vec![1.0, 1.0]),
            Err(Error::Config(_))
        ));
        assert!(Bounds::new(alloc::vec![f64::NAN], alloc::vec![1.0]).is_err());
        assert!(Bounds::new(alloc::vec![], alloc::vec![]).is_err());
    }

    #[test]
    fn contains_and_clamp() {
        let b = Bounds::uniform(2, -1.0, 1.0).unwrap();
        assert!(b.contains(&[0.0, 1.0]));
        assert!(!b.contains(&[0.0, 1.5]));
        assert!(!b.contains(&[0.0]));
        assert_eq!(b.clamp(0, 3.0), 1.0);
        assert_eq!(b.clamp(1, -3.0), -1.0);
    }
}

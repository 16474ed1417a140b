//! Pareto dominance and non-dominated sorting (minimization).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::population::Population;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    FirstDominates,
    SecondDominates,
    Incomparable,
    Equal,
}

impl Dominance {
    /// The relation seen from the other side.
    pub fn mirrored(self) -> Self {
        match self {
            Dominance::FirstDominates => Dominance::SecondDominates,
            Dominance::SecondDominates => Dominance::FirstDominates,
            other => other,
        }
    }
}

/// Compares two objective vectors.
pub fn dominance(a: &[f64], b: &[f64]) -> Result<Dominance> {
    if a.len() != b.len() {
        return Err(Error::config(format!(
            "objective vectors differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    Ok(compare(a, b))
}

pub(crate) fn compare(a: &[f64], b: &[f64]) -> Dominance {
    let mut a_better = false;
    let mut b_better = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            a_better = true;
        } else if y < x {
            b_better = true;
        }
        if a_better && b_better {
            return Dominance::Incomparable;
        }
    }
    match (a_better, b_better) {
        (true, false) => Dominance::FirstDominates,
        (false, true) => Dominance::SecondDominates,
        (false, false) => Dominance::Equal,
        (true, true) => Dominance::Incomparable,
    }
}

/// `true` iff `a` Pareto-dominates `b`.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    compare(a, b) == Dominance::FirstDominates
}

/// Fronts of a non-dominated sort, best first. Each front lists indices
/// in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontPartition {
    fronts: Vec<Vec<usize>>,
}

impl FrontPartition {
    pub fn fronts(&self) -> &[Vec<usize>] {
        &self.fronts
    }

    pub fn into_fronts(self) -> Vec<Vec<usize>> {
        self.fronts
    }

    pub fn first(&self) -> &[usize] {
        &self.fronts[0]
    }

    pub fn len(&self) -> usize {
        self.fronts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fronts.is_empty()
    }

    /// Front number (0-based) of every point.
    pub fn ranks(&self) -> Vec<usize> {
        let n = self.fronts.iter().map(Vec::len).sum();
        let mut ranks = vec![0; n];
        for (r, front) in self.fronts.iter().enumerate() {
            for &i in front {
                ranks[i] = r;
            }
        }
        ranks
    }
}

/// Fast non-dominated sort over raw objective vectors.
pub fn sort_points<V: AsRef<[f64]>>(points: &[V]) -> Result<FrontPartition> {
    let n = points.len();
    if n == 0 {
        return Err(Error::usage("cannot sort an empty set"));
    }
    let m = points[0].as_ref().len();
    if let Some(bad) = points.iter().find(|p| p.as_ref().len() != m) {
        return Err(Error::config(format!(
            "objective vectors differ in length ({} vs {m})",
            bad.as_ref().len()
        )));
    }

    let mut dominated: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut counts = vec![0usize; n];
    for p in 0..n {
        for q in (p + 1)..n {
            match compare(points[p].as_ref(), points[q].as_ref()) {
                Dominance::FirstDominates => {
                    dominated[p].push(q);
                    counts[q] += 1;
                }
                Dominance::SecondDominates => {
                    dominated[q].push(p);
                    counts[p] += 1;
                }
                _ => {}
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| counts[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated[p] {
                counts[q] -= 1;
                if counts[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    Ok(FrontPartition { fronts })
}

/// Non-dominated sort of an evaluated population.
pub fn nondominated_sort(pop: &Population) -> Result<FrontPartition> {
    sort_points(&pop.objectives()?)
}

/// Indices of the points no other point dominates, ascending.
pub fn nondominated_indices<V: AsRef<[f64]>>(points: &[V]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !points
                .iter()
                .any(|q| dominates(q.as_ref(), points[i].as_ref()))
        })
        .collect()
}

//! Nonparametric comparison: rank-sum marks, paired signed-rank and Friedman
//! mean ranks.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use libm::{erfc, sqrt};

use crate::error::{Error, Result};

/// Largest `|a| + |b|` for which the rank-sum test uses its exact null
/// distribution (tie-free samples only).
pub const RANKSUM_EXACT_MAX_TOTAL: usize = 20;

/// Largest number of non-zero differences for which the signed-rank test uses
/// its exact null distribution.
pub const SIGNED_RANK_EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    LowerIsBetter,
    HigherIsBetter,
}

impl Orientation {
    /// True when `x` is strictly better than `y`.
    pub fn better(self, x: f64, y: f64) -> bool {
        match self {
            Orientation::LowerIsBetter => x < y,
            Orientation::HigherIsBetter => x > y,
        }
    }

    fn signed(self, x: f64) -> f64 {
        match self {
            Orientation::LowerIsBetter => x,
            Orientation::HigherIsBetter => -x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mark {
    Better,
    Worse,
    Equal,
}

impl Mark {
    pub fn symbol(self) -> &'static str {
        match self {
            Mark::Better => "+",
            Mark::Worse => "-",
            Mark::Equal => "=",
        }
    }

    pub fn mirrored(self) -> Self {
        match self {
            Mark::Better => Mark::Worse,
            Mark::Worse => Mark::Better,
            Mark::Equal => Mark::Equal,
        }
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Outcome of comparing sample `a` against sample `b`: `Better` means `a` is
/// significantly better.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonMark {
    pub mark: Mark,
    pub p_value: f64,
    pub orientation: Orientation,
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedRankResult {
    /// Rank mass of pairs where `a` is better.
    pub r_plus: f64,
    /// Rank mass of pairs where `b` is better.
    pub r_minus: f64,
    pub p_value: f64,
    pub n_effective: usize,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriedmanResult {
    pub mean_ranks: Vec<f64>,
    pub n_problems: usize,
    pub chi_square: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregate {
    #[default]
    Mean,
    Median,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (`n - 1` denominator); zero for one value.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    sqrt(xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64)
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

impl Aggregate {
    pub fn apply(self, xs: &[f64]) -> f64 {
        match self {
            Aggregate::Mean => mean(xs),
            Aggregate::Median => median(xs),
        }
    }
}

/// Ranks starting at 1, tied values sharing the mean of their positions.
/// Also returns the tie-group sizes.
pub fn midranks(xs: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let mut ranks = vec![0.0; xs.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && xs[order[end]] == xs[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        ties.push(end - start);
        start = end;
    }
    (ranks, ties)
}

fn check_finite(xs: &[f64], what: &str) -> Result<()> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::config(format!("{what} contains a non-finite value")));
    }
    Ok(())
}

fn normal_two_sided(z: f64) -> f64 {
    erfc(z.abs() / core::f64::consts::SQRT_2).min(1.0)
}

/// Number of `k`-subsets of `{1..n}` with each possible rank sum.
fn subset_sum_counts(n: usize, k: usize) -> Vec<f64> {
    let max_sum = n * (n + 1) / 2;
    // counts[j][s]: subsets of size j drawn from the ranks seen so far.
    let mut counts = vec![vec![0.0f64; max_sum + 1]; k + 1];
    counts[0][0] = 1.0;
    for r in 1..=n {
        for j in (1..=k.min(r)).rev() {
            for s in (r..=max_sum).rev() {
                counts[j][s] += counts[j - 1][s - r];
            }
        }
    }
    counts.swap_remove(k)
}

/// Two-sided Wilcoxon rank-sum (Mann-Whitney) test of `a` against `b`.
pub fn ranksum_mark(a: &[f64], b: &[f64], alpha: f64, orientation: Orientation) -> Result<ComparisonMark> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::usage("rank-sum test needs at least two values per sample"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::config(format!("significance level {alpha} outside (0, 1)")));
    }
    check_finite(a, "first sample")?;
    check_finite(b, "second sample")?;
    let (n1, n2) = (a.len(), b.len());
    let n = n1 + n2;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let w: f64 = ranks[..n1].iter().sum();
    let expected = n1 as f64 * (n + 1) as f64 / 2.0;
    let no_ties = ties.iter().all(|&t| t == 1);

    let (p_value, exact) = if no_ties && n <= RANKSUM_EXACT_MAX_TOTAL {
        let counts = subset_sum_counts(n, n1);
        let total: f64 = counts.iter().sum();
        // Doubled deviations stay integral.
        let obs = (2.0 * w - 2.0 * expected).abs();
        let extreme: f64 = counts
            .iter()
            .enumerate()
            .filter(|(s, _)| (2.0 * *s as f64 - 2.0 * expected).abs() >= obs - 1e-9)
            .map(|(_, c)| c)
            .sum();
        ((extreme / total).min(1.0), true)
    } else {
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
        let nf = n as f64;
        let var = n1 as f64 * n2 as f64 / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
        if var <= 0.0 {
            (1.0, false)
        } else {
            let z = ((w - expected).abs() - 0.5).max(0.0) / sqrt(var);
            (normal_two_sided(z), false)
        }
    };

    let mean_rank_a = w / n1 as f64;
    let mean_rank_b = ranks[n1..].iter().sum::<f64>() / n2 as f64;
    let mark = if p_value >= alpha || mean_rank_a == mean_rank_b {
        Mark::Equal
    } else {
        // A lower mean rank means smaller values.
        let a_smaller = mean_rank_a < mean_rank_b;
        match (orientation, a_smaller) {
            (Orientation::LowerIsBetter, true) | (Orientation::HigherIsBetter, false) => Mark::Better,
            _ => Mark::Worse,
        }
    };
    Ok(ComparisonMark {
        mark,
        p_value,
        orientation,
        exact,
    })
}

/// Two-sided Wilcoxon signed-rank test over the pairs `(a[i], b[i])`.
pub fn signed_rank(a: &[f64], b: &[f64], orientation: Orientation) -> Result<SignedRankResult> {
    if a.len() != b.len() {
        return Err(Error::config(format!(
            "paired samples differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::usage("signed-rank test needs at least two pairs"));
    }
    check_finite(a, "first sample")?;
    check_finite(b, "second sample")?;
    // Positive difference: `a` is better.
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| orientation.signed(y - x))
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(SignedRankResult {
            r_plus: 0.0,
            r_minus: 0.0,
            p_value: 1.0,
            n_effective: 0,
            exact: true,
        });
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = midranks(&magnitudes);
    let r_plus: f64 = ranks.iter().zip(&diffs).filter(|(_, d)| **d > 0.0).map(|(r, _)| r).sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let r_minus = total - r_plus;

    let (p_value, exact) = if n <= SIGNED_RANK_EXACT_MAX_N {
        (signed_rank_exact_p(&ranks, r_plus), true)
    } else {
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum();
        let nf = n as f64;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let z = ((r_plus - total / 2.0).abs() - 0.5).max(0.0) / sqrt(var);
        (normal_two_sided(z), false)
    };
    Ok(SignedRankResult {
        r_plus,
        r_minus,
        p_value,
        n_effective: n,
        exact,
    })
}

/// Exact two-sided p over all sign assignments of the given (mid)ranks.
fn signed_rank_exact_p(ranks: &[f64], r_plus: f64) -> f64 {
    // Doubled midranks are integers.
    let doubled: Vec<usize> = ranks.iter().map(|r| libm::round(2.0 * r) as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; max_sum + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        reach += r;
        for s in (r..=reach).rev() {
            counts[s] += counts[s - r];
        }
    }
    let center = max_sum as f64 / 2.0;
    let obs = (2.0 * r_plus - center).abs();
    let extreme: f64 = counts
        .iter()
        .enumerate()
        .filter(|(s, _)| (*s as f64 - center).abs() >= obs - 1e-9)
        .map(|(_, c)| c)
        .sum();
    let total = libm::pow(2.0, ranks.len() as f64);
    (extreme / total).min(1.0)
}

/// Friedman ranking of a problems x algorithms score matrix; rank 1 is best.
pub fn friedman_ranks<R: AsRef<[f64]>>(matrix: &[R], orientation: Orientation) -> Result<FriedmanResult> {
    let n = matrix.len();
    if n < 2 {
        return Err(Error::usage("Friedman ranking needs at least two problems"));
    }
    let k = matrix[0].as_ref().len();
    if k < 2 {
        return Err(Error::usage("Friedman ranking needs at least two algorithms"));
    }
    let mut sums = vec![0.0; k];
    for row in matrix {
        let row = row.as_ref();
        if row.len() != k {
            return Err(Error::config(format!(
                "ragged score matrix: row of {} against {k} algorithms",
                row.len()
            )));
        }
        check_finite(row, "score matrix")?;
        let keyed: Vec<f64> = row.iter().map(|&x| orientation.signed(x)).collect();
        let (ranks, _) = midranks(&keyed);
        for (s, r) in sums.iter_mut().zip(ranks) {
            *s += r;
        }
    }
    let mean_ranks: Vec<f64> = sums.iter().map(|s| s / n as f64).collect();
    let (nf, kf) = (n as f64, k as f64);
    let centre = (kf + 1.0) / 2.0;
    let chi_square = 12.0 * nf / (kf * (kf + 1.0))
        * mean_ranks.iter().map(|r| (r - centre) * (r - centre)).sum::<f64>();
    Ok(FriedmanResult {
        mean_ranks,
        n_problems: n,
        chi_square,
    })
}

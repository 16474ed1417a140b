//! Brute-force oracles shared by the property suites.
#![allow(dead_code)]

pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

/// Repeatedly peels off the points no remaining point dominates.
pub fn peel_fronts(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut remaining: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| !remaining.iter().any(|&j| dominates(&points[j], &points[i])))
            .collect();
        remaining.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

/// Hypervolume by inclusion-exclusion over all subsets.
pub fn hv_inclusion_exclusion(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let pts: Vec<&Vec<f64>> = points
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(a, r)| a < r))
        .collect();
    let mut total = 0.0;
    for mask in 1u32..(1 << pts.len()) {
        let mut corner = vec![f64::NEG_INFINITY; reference.len()];
        for (i, p) in pts.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for (c, v) in corner.iter_mut().zip(p.iter()) {
                    *c = c.max(*v);
                }
            }
        }
        let vol: f64 = corner.iter().zip(reference).map(|(c, r)| r - c).product();
        if mask.count_ones() % 2 == 1 {
            total += vol;
        } else {
            total -= vol;
        }
    }
    total
}

/// Two-sided rank-sum p by listing every placement of `a`'s ranks among
/// `1..=n1+n2` (tie-free samples).
pub fn ranksum_enumerated_p(a: &[f64], b: &[f64]) -> f64 {
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let rank = |x: f64| (pooled.iter().position(|&v| v == x).unwrap() + 1) as f64;
    let observed: f64 = a.iter().map(|&x| rank(x)).sum();
    let n = pooled.len();
    let n1 = a.len();
    let centre = n1 as f64 * (n + 1) as f64 / 2.0;
    let (mut extreme, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n1 {
            continue;
        }
        let w: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| (i + 1) as f64).sum();
        total += 1;
        if (w - centre).abs() >= (observed - centre).abs() - 1e-9 {
            extreme += 1;
        }
    }
    extreme as f64 / total as f64
}

/// Two-sided signed-rank p by listing all `2^n` sign patterns of the
/// midranks of `|d|` (zero differences dropped beforehand by the caller).
pub fn signed_rank_enumerated(d: &[f64]) -> (f64, f64) {
    let n = d.len();
    let ranks: Vec<f64> = d
        .iter()
        .map(|x| {
            let below = d.iter().filter(|y| y.abs() < x.abs()).count() as f64;
            let equal = d.iter().filter(|y| y.abs() == x.abs()).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let observed: f64 = ranks.iter().zip(d).filter(|(_, x)| **x > 0.0).map(|(r, _)| r).sum();
    let centre = (n * (n + 1)) as f64 / 4.0;
    let mut extreme = 0u64;
    for mask in 0u32..(1 << n) {
        let s: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
        if (s - centre).abs() >= (observed - centre).abs() - 1e-9 {
            extreme += 1;
        }
    }
    (observed, (extreme as f64 / (1u64 << n) as f64).min(1.0))
}

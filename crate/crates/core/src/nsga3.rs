//! NSGA-III survival selection.
//!
//! Members are sorted into fronts; whole fronts are kept while they fit and
//! the last, partially fitting front is thinned by reference-direction
//! niching. Objectives are normalized by the running ideal point and the
//! intercepts of the hyperplane through the per-axis extreme points; a
//! degenerate hyperplane falls back to `max - ideal`.
//!
//! [`first_front_selection`] is the archive variant: only front 1 survives,
//! truncated by the same niching when it holds more than `n` members.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use libm::sqrt;
use rand::Rng;

use crate::dominance::sort_points;
use crate::error::{Error, Result};
use crate::population::Population;
use crate::rng::StreamRng;
use crate::temof::SurvivalSelection;

/// Upper limit on the size of a generated lattice.
pub const MAX_REFERENCE_POINTS: u64 = 1 << 22;

/// Floor for fallback intercepts.
pub const INTERCEPT_FLOOR: f64 = 1e-12;

/// Structured reference directions on the unit simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePointSet {
    points: Vec<Vec<f64>>,
}

impl ReferencePointSet {
    /// Wraps arbitrary directions; each must be non-negative and sum to 1.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let m = points.first().map(Vec::len).unwrap_or(0);
        if m == 0 {
            return Err(Error::config("reference set must not be empty"));
        }
        for p in &points {
            let sum: f64 = p.iter().sum();
            if p.len() != m || p.iter().any(|&w| w < 0.0) || (sum - 1.0).abs() > 1e-9 {
                return Err(Error::config(format!("{p:?} is not on the unit simplex")));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n_obj(&self) -> usize {
        self.points[0].len()
    }
}

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    u64::try_from(acc).ok()
}

/// Number of simplex-lattice points with `divisions` steps per axis.
pub fn lattice_size(n_obj: usize, divisions: usize) -> Option<u64> {
    let n_obj = n_obj as u64;
    binomial((divisions as u64).checked_add(n_obj)? - 1, n_obj - 1)
}

/// All points `w` with `w_i = k_i / divisions`, `sum k_i = divisions`,
/// in lexicographic order of `k`.
pub fn das_dennis(n_obj: usize, divisions: usize) -> Result<ReferencePointSet> {
    if n_obj < 2 || divisions < 1 {
        return Err(Error::config(format!(
            "lattice needs n_obj >= 2 and divisions >= 1 (got {n_obj}, {divisions})"
        )));
    }
    let count = lattice_size(n_obj, divisions);
    match count {
        Some(c) if c <= MAX_REFERENCE_POINTS => {}
        Some(c) => {
            return Err(Error::config(format!(
                "lattice ({n_obj}, {divisions}) would hold {c} points (limit {MAX_REFERENCE_POINTS})"
            )))
        }
        None => {
            return Err(Error::config(format!(
                "lattice ({n_obj}, {divisions}) point count overflows u64"
            )))
        }
    }
    let mut points = Vec::with_capacity(count.unwrap_or(0) as usize);
    let mut counts = vec![0usize; n_obj];
    fill_lattice(&mut counts, 0, divisions, divisions, &mut points);
    Ok(ReferencePointSet { points })
}

fn fill_lattice(
    counts: &mut [usize],
    axis: usize,
    left: usize,
    divisions: usize,
    out: &mut Vec<Vec<f64>>,
) {
    if axis == counts.len() - 1 {
        counts[axis] = left;
        out.push(counts.iter().map(|&k| k as f64 / divisions as f64).collect());
        return;
    }
    for k in 0..=left {
        counts[axis] = k;
        fill_lattice(counts, axis + 1, left - k, divisions, out);
    }
}

/// Largest `divisions` whose lattice holds at most `n` points (at least 1).
pub fn divisions_for(n_obj: usize, n: usize) -> usize {
    let mut h = 1;
    while lattice_size(n_obj, h + 1).is_some_and(|c| c <= n as u64) {
        h += 1;
    }
    h
}

/// Running ideal point and the last intercepts used for normalization.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormalizationState {
    ideal: Option<Vec<f64>>,
    intercepts: Vec<f64>,
    fallback: bool,
}

impl NormalizationState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ideal(&self) -> Option<&[f64]> {
        self.ideal.as_deref()
    }

    pub fn intercepts(&self) -> &[f64] {
        &self.intercepts
    }

    /// Whether the last call fell back to `max - ideal` intercepts.
    pub fn used_fallback(&self) -> bool {
        self.fallback
    }
}

/// Translates by the running ideal point and scales by hyperplane intercepts.
pub fn normalize<V: AsRef<[f64]>>(objs: &[V], state: &mut NormalizationState) -> Vec<Vec<f64>> {
    let Some(first) = objs.first() else {
        return Vec::new();
    };
    let m = first.as_ref().len();
    let ideal = state.ideal.get_or_insert_with(|| vec![f64::INFINITY; m]);
    for f in objs {
        for (z, &v) in ideal.iter_mut().zip(f.as_ref()) {
            *z = z.min(v);
        }
    }
    let ideal = ideal.clone();
    let translated: Vec<Vec<f64>> = objs
        .iter()
        .map(|f| f.as_ref().iter().zip(&ideal).map(|(v, z)| v - z).collect())
        .collect();

    let extremes: Vec<Vec<f64>> = (0..m)
        .map(|axis| {
            let asf = |p: &Vec<f64>| {
                p.iter()
                    .enumerate()
                    .map(|(i, &v)| if i == axis { v } else { v / 1e-6 })
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            let mut best = 0;
            let mut best_val = f64::INFINITY;
            for (i, p) in translated.iter().enumerate() {
                let val = asf(p);
                if val < best_val {
                    best_val = val;
                    best = i;
                }
            }
            translated[best].clone()
        })
        .collect();

    let from_plane = solve(extremes, vec![1.0; m]).and_then(|b| {
        let icpt: Vec<f64> = b.iter().map(|&bi| 1.0 / bi).collect();
        icpt.iter()
            .all(|&a| a.is_finite() && a > 1e-6)
            .then_some(icpt)
    });
    state.fallback = from_plane.is_none();
    state.intercepts = from_plane.unwrap_or_else(|| {
        (0..m)
            .map(|i| {
                translated
                    .iter()
                    .map(|p| p[i])
                    .fold(0.0, f64::max)
                    .max(INTERCEPT_FLOOR)
            })
            .collect()
    });
    translated
        .into_iter()
        .map(|p| p.iter().zip(&state.intercepts).map(|(v, a)| v / a).collect())
        .collect()
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let (head, tail) = a.split_at_mut(col + 1);
        let pivot_row = &head[col];
        for (offset, row) in tail.iter_mut().enumerate() {
            let factor = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= factor * p;
            }
            b[col + 1 + offset] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = ((row + 1)..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Closest reference direction of a normalized point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Association {
    pub reference: usize,
    pub distance: f64,
}

/// Distance from `p` to the ray through the origin along `w`.
pub fn perpendicular_distance(p: &[f64], w: &[f64]) -> f64 {
    let ww: f64 = w.iter().map(|v| v * v).sum();
    let pw: f64 = p.iter().zip(w).map(|(a, b)| a * b).sum();
    let t = pw / ww;
    sqrt(p.iter().zip(w).map(|(a, b)| (a - t * b) * (a - t * b)).sum())
}

/// Nearest reference ray of each point; ties go to the lowest index.
pub fn associate<V: AsRef<[f64]>>(normalized: &[V], refs: &ReferencePointSet) -> Vec<Association> {
    normalized
        .iter()
        .map(|p| {
            let mut best = Association {
                reference: 0,
                distance: f64::INFINITY,
            };
            for (j, w) in refs.points().iter().enumerate() {
                let d = perpendicular_distance(p.as_ref(), w);
                if d < best.distance {
                    best = Association {
                        reference: j,
                        distance: d,
                    };
                }
            }
            best
        })
        .collect()
}

/// Picks `k` of the candidates (given as positions into `assoc`).
fn niche_select(
    candidates: &[usize],
    assoc: &[Association],
    niche_count: &mut [usize],
    k: usize,
    rng: &mut StreamRng,
) -> Vec<usize> {
    let mut pool: Vec<Vec<usize>> = vec![Vec::new(); niche_count.len()];
    for &c in candidates {
        pool[assoc[c].reference].push(c);
    }
    let mut chosen = Vec::with_capacity(k);
    let mut ties = Vec::new();
    while chosen.len() < k {
        let min = (0..pool.len())
            .filter(|&j| !pool[j].is_empty())
            .map(|j| niche_count[j])
            .min()
            .expect("fewer candidates than requested");
        ties.clear();
        ties.extend((0..pool.len()).filter(|&j| !pool[j].is_empty() && niche_count[j] == min));
        let j = ties[rng.random_range(0..ties.len())];

        let slot = if niche_count[j] == 0 {
            let mut best = 0;
            for (s, &c) in pool[j].iter().enumerate() {
                if assoc[c].distance < assoc[pool[j][best]].distance {
                    best = s;
                }
            }
            best
        } else {
            rng.random_range(0..pool[j].len())
        };
        chosen.push(pool[j].remove(slot));
        niche_count[j] += 1;
    }
    chosen
}

fn check_dims(pop_obj: usize, refs: &ReferencePointSet) -> Result<()> {
    if pop_obj != refs.n_obj() {
        return Err(Error::config(format!(
            "population has {pop_obj} objectives, reference set {}",
            refs.n_obj()
        )));
    }
    Ok(())
}

/// NSGA-III truncation of `pop` to `min(n, |pop|)` members. Survivors keep
/// their original relative order.
pub fn environmental_selection(
    pop: Population,
    n: usize,
    refs: &ReferencePointSet,
    state: &mut NormalizationState,
    rng: &mut StreamRng,
) -> Result<Population> {
    let objs = pop.objectives()?;
    if pop.len() <= n {
        return Ok(pop);
    }
    check_dims(objs[0].len(), refs)?;

    let mut selected = Vec::with_capacity(n);
    let mut critical: &[usize] = &[];
    let partition = sort_points(&objs)?;
    for front in partition.fronts() {
        if selected.len() + front.len() <= n {
            selected.extend_from_slice(front);
            if selected.len() == n {
                break;
            }
        } else {
            critical = front;
            break;
        }
    }

    if !critical.is_empty() {
        let members: Vec<usize> = selected.iter().chain(critical).copied().collect();
        let st: Vec<&[f64]> = members.iter().map(|&i| objs[i]).collect();
        let normalized = normalize(&st, state);
        let assoc = associate(&normalized, refs);
        let mut niche_count = vec![0usize; refs.len()];
        for a in &assoc[..selected.len()] {
            niche_count[a.reference] += 1;
        }
        let candidates: Vec<usize> = (selected.len()..members.len()).collect();
        let picked = niche_select(
            &candidates,
            &assoc,
            &mut niche_count,
            n - selected.len(),
            rng,
        );
        selected.extend(picked.into_iter().map(|pos| members[pos]));
    }
    selected.sort_unstable();
    Ok(pop.select(&selected))
}

/// Keeps only front 1 of `pop`, niching it down to `n` if it is larger.
pub fn first_front_selection(
    pop: Population,
    n: usize,
    refs: &ReferencePointSet,
    state: &mut NormalizationState,
    rng: &mut StreamRng,
) -> Result<Population> {
    let objs = pop.objectives()?;
    if objs.is_empty() {
        return Ok(pop);
    }
    check_dims(objs[0].len(), refs)?;
    let partition = sort_points(&objs)?;
    let front = partition.first();
    if front.len() <= n {
        return Ok(pop.select(front));
    }
    let st: Vec<&[f64]> = front.iter().map(|&i| objs[i]).collect();
    let normalized = normalize(&st, state);
    let assoc = associate(&normalized, refs);
    let mut niche_count = vec![0usize; refs.len()];
    let candidates: Vec<usize> = (0..front.len()).collect();
    let mut picked: Vec<usize> = niche_select(&candidates, &assoc, &mut niche_count, n, rng)
        .into_iter()
        .map(|pos| front[pos])
        .collect();
    picked.sort_unstable();
    Ok(pop.select(&picked))
}

/// NSGA-III as a pluggable survival-selection pair.
#[derive(Debug, Clone)]
pub struct Nsga3Selection {
    refs: ReferencePointSet,
    state: NormalizationState,
}

impl Nsga3Selection {
    pub fn new(refs: ReferencePointSet) -> Self {
        Self {
            refs,
            state: NormalizationState::new(),
        }
    }

    /// Lattice sized for a population of `n` (largest lattice `<= n`).
    pub fn for_population(n_obj: usize, n: usize) -> Result<Self> {
        Ok(Self::new(das_dennis(n_obj, divisions_for(n_obj, n))?))
    }

    pub fn references(&self) -> &ReferencePointSet {
        &self.refs
    }

    pub fn state(&self) -> &NormalizationState {
        &self.state
    }
}

impl SurvivalSelection for Nsga3Selection {
    fn environmental_selection(
        &mut self,
        pop: Population,
        n: usize,
        rng: &mut StreamRng,
    ) -> Result<Population> {
        environmental_selection(pop, n, &self.refs, &mut self.state, rng)
    }

    fn first_front_selection(
        &mut self,
        pop: Population,
        n: usize,
        rng: &mut StreamRng,
    ) -> Result<Population> {
        first_front_selection(pop, n, &self.refs, &mut self.state, rng)
    }
}

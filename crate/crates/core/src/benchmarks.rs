//! DTLZ and ZDT test problems with analytic Pareto fronts.
//!
//! DTLZ problems take any `n_obj >= 2`; their default decision dimension is
//! `n_obj + k - 1` with `k = 5` (DTLZ1), `10` (DTLZ2-6) or `20` (DTLZ7).
//! ZDT problems are bi-objective. All variables live in `[0, 1]` except the
//! tail of ZDT4, which lives in `[-5, 5]`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, exp, pow, sin, sqrt};

use crate::dominance::nondominated_indices;
use crate::error::{Error, Result};
use crate::nsga3::{das_dennis, divisions_for, lattice_size};
use crate::problem::{Bounds, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Dtlz1,
    Dtlz2,
    Dtlz3,
    Dtlz4,
    Dtlz5,
    Dtlz6,
    Dtlz7,
    Zdt1,
    Zdt2,
    Zdt3,
    Zdt4,
    Zdt6,
}

impl Family {
    pub const ALL: [Family; 12] = [
        Family::Dtlz1,
        Family::Dtlz2,
        Family::Dtlz3,
        Family::Dtlz4,
        Family::Dtlz5,
        Family::Dtlz6,
        Family::Dtlz7,
        Family::Zdt1,
        Family::Zdt2,
        Family::Zdt3,
        Family::Zdt4,
        Family::Zdt6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Dtlz1 => "DTLZ1",
            Family::Dtlz2 => "DTLZ2",
            Family::Dtlz3 => "DTLZ3",
            Family::Dtlz4 => "DTLZ4",
            Family::Dtlz5 => "DTLZ5",
            Family::Dtlz6 => "DTLZ6",
            Family::Dtlz7 => "DTLZ7",
            Family::Zdt1 => "ZDT1",
            Family::Zdt2 => "ZDT2",
            Family::Zdt3 => "ZDT3",
            Family::Zdt4 => "ZDT4",
            Family::Zdt6 => "ZDT6",
        }
    }

    /// Case-insensitive lookup.
    pub fn from_name(name: &str) -> Option<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(name))
    }

    pub fn is_zdt(self) -> bool {
        matches!(
            self,
            Family::Zdt1 | Family::Zdt2 | Family::Zdt3 | Family::Zdt4 | Family::Zdt6
        )
    }

    pub fn default_n_var(self, n_obj: usize) -> usize {
        match self {
            Family::Dtlz1 => n_obj + 4,
            Family::Dtlz7 => n_obj + 19,
            Family::Zdt1 | Family::Zdt2 | Family::Zdt3 => 30,
            Family::Zdt4 | Family::Zdt6 => 10,
            _ => n_obj + 9,
        }
    }

    /// Default objective count (3 for DTLZ, 2 for ZDT).
    pub fn default_n_obj(self) -> usize {
        if self.is_zdt() {
            2
        } else {
            3
        }
    }
}

fn valid_names() -> String {
    Family::ALL.map(Family::name).join(", ")
}

/// A configured benchmark instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    family: Family,
    n_obj: usize,
    bounds: Bounds,
}

/// Looks up `name` and validates the dimensions for its family.
/// `n_var = None` selects the family default.
pub fn make_problem(name: &str, n_var: Option<usize>, n_obj: usize) -> Result<Benchmark> {
    let family = Family::from_name(name).ok_or_else(|| {
        Error::config(format!(
            "unknown problem '{name}'; valid options: {}",
            valid_names()
        ))
    })?;
    Benchmark::new(family, n_var.unwrap_or_else(|| family.default_n_var(n_obj)), n_obj)
}

impl Benchmark {
    pub fn new(family: Family, n_var: usize, n_obj: usize) -> Result<Self> {
        if family.is_zdt() {
            if n_obj != 2 {
                return Err(Error::config(format!(
                    "{} is bi-objective (got n_obj = {n_obj})",
                    family.name()
                )));
            }
            if n_var < 2 {
                return Err(Error::config(format!(
                    "{} needs at least 2 variables (got {n_var})",
                    family.name()
                )));
            }
        } else if n_obj < 2 || n_var < n_obj {
            return Err(Error::config(format!(
                "{} needs n_obj >= 2 and n_var >= n_obj (got n_var = {n_var}, n_obj = {n_obj})",
                family.name()
            )));
        }
        let bounds = if family == Family::Zdt4 {
            let mut lower = vec![-5.0; n_var];
            let mut upper = vec![5.0; n_var];
            lower[0] = 0.0;
            upper[0] = 1.0;
            Bounds::new(lower, upper)?
        } else {
            Bounds::uniform(n_var, 0.0, 1.0)?
        };
        Ok(Self {
            family,
            n_obj,
            bounds,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }
}

impl Problem for Benchmark {
    fn name(&self) -> &str {
        self.family.name()
    }

    fn n_obj(&self) -> usize {
        self.n_obj
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        let m = self.n_obj;
        match self.family {
            Family::Dtlz1 => {
                let g = g_rastrigin(&x[m - 1..]);
                linear_front(&x[..m - 1], 0.5 * (1.0 + g))
            }
            Family::Dtlz2 => spherical_front(&angles(&x[..m - 1]), 1.0 + g_sphere(&x[m - 1..])),
            Family::Dtlz3 => {
                spherical_front(&angles(&x[..m - 1]), 1.0 + g_rastrigin(&x[m - 1..]))
            }
            Family::Dtlz4 => {
                let biased: Vec<f64> = x[..m - 1].iter().map(|&v| pow(v, 100.0)).collect();
                spherical_front(&angles(&biased), 1.0 + g_sphere(&x[m - 1..]))
            }
            Family::Dtlz5 | Family::Dtlz6 => {
                let tail = &x[m - 1..];
                let g = if self.family == Family::Dtlz5 {
                    g_sphere(tail)
                } else {
                    tail.iter().map(|&v| pow(v, 0.1)).sum()
                };
                let theta: Vec<f64> = x[..m - 1]
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        if i == 0 {
                            v * PI / 2.0
                        } else {
                            PI / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * v)
                        }
                    })
                    .collect();
                spherical_front(&theta, 1.0 + g)
            }
            Family::Dtlz7 => {
                let tail = &x[m - 1..];
                let g = 1.0 + 9.0 * tail.iter().sum::<f64>() / tail.len() as f64;
                let mut f: Vec<f64> = x[..m - 1].to_vec();
                f.push((1.0 + g) * dtlz7_h(&f, g, m));
                f
            }
            Family::Zdt1 | Family::Zdt2 | Family::Zdt3 => {
                let g = 1.0 + 9.0 * x[1..].iter().sum::<f64>() / (x.len() - 1) as f64;
                let f1 = x[0];
                let r = f1 / g;
                let h = match self.family {
                    Family::Zdt1 => 1.0 - sqrt(r),
                    Family::Zdt2 => 1.0 - r * r,
                    _ => 1.0 - sqrt(r) - r * sin(10.0 * PI * f1),
                };
                vec![f1, g * h]
            }
            Family::Zdt4 => {
                let g = 1.0
                    + 10.0 * (x.len() - 1) as f64
                    + x[1..]
                        .iter()
                        .map(|&v| v * v - 10.0 * cos(4.0 * PI * v))
                        .sum::<f64>();
                let f1 = x[0];
                vec![f1, g * (1.0 - sqrt(f1 / g))]
            }
            Family::Zdt6 => {
                let f1 = 1.0 - exp(-4.0 * x[0]) * pow(sin(6.0 * PI * x[0]), 6.0);
                let g = 1.0 + 9.0 * pow(x[1..].iter().sum::<f64>() / (x.len() - 1) as f64, 0.25);
                let r = f1 / g;
                vec![f1, g * (1.0 - r * r)]
            }
        }
    }

    fn sample_front(&self, count: usize) -> Result<Vec<Vec<f64>>> {
        if count == 0 {
            return Err(Error::usage("front sample size must be positive"));
        }
        let m = self.n_obj;
        let front = match self.family {
            Family::Dtlz1 => lattice(m, count)?
                .into_iter()
                .map(|w| w.into_iter().map(|v| 0.5 * v).collect())
                .collect(),
            Family::Dtlz2 | Family::Dtlz3 | Family::Dtlz4 => lattice(m, count)?
                .into_iter()
                .map(|w| {
                    let norm = sqrt(w.iter().map(|v| v * v).sum());
                    w.into_iter().map(|v| v / norm).collect()
                })
                .collect(),
            Family::Dtlz5 | Family::Dtlz6 => degenerate_curve(m, count),
            Family::Dtlz7 => dtlz7_front(m, count),
            Family::Zdt1 | Family::Zdt4 => curve(count, 0.0, 1.0, |f1| 1.0 - sqrt(f1)),
            Family::Zdt2 => curve(count, 0.0, 1.0, |f1| 1.0 - f1 * f1),
            Family::Zdt3 => zdt3_front(count),
            Family::Zdt6 => curve(count, ZDT6_MIN_F1, 1.0, |f1| 1.0 - f1 * f1),
        };
        Ok(front)
    }
}

const ZDT6_MIN_F1: f64 = 0.280_775_319_1;

const ZDT3_REGIONS: [(f64, f64); 5] = [
    (0.0, 0.083_001_534_9),
    (0.182_228_780, 0.257_762_363_4),
    (0.409_313_674_8, 0.453_882_104_1),
    (0.618_396_794_4, 0.652_511_703_8),
    (0.823_331_798_3, 0.851_832_865_4),
];

const DTLZ7_REGIONS: [(f64, f64); 2] = [(0.0, 0.251_412), (0.631_627, 0.859_401)];

fn g_sphere(tail: &[f64]) -> f64 {
    tail.iter().map(|v| (v - 0.5) * (v - 0.5)).sum()
}

fn g_rastrigin(tail: &[f64]) -> f64 {
    100.0
        * (tail.len() as f64
            + tail
                .iter()
                .map(|&v| (v - 0.5) * (v - 0.5) - cos(20.0 * PI * (v - 0.5)))
                .sum::<f64>())
}

fn angles(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| v * PI / 2.0).collect()
}

/// `f_i = scale * prod_{j < m-1-i} x_j * (1 - x_{m-1-i})` (last factor for i > 0).
fn linear_front(x: &[f64], scale: f64) -> Vec<f64> {
    let m = x.len() + 1;
    (0..m)
        .map(|i| {
            let head: f64 = x[..m - 1 - i].iter().product();
            let last = if i > 0 { 1.0 - x[m - 1 - i] } else { 1.0 };
            scale * head * last
        })
        .collect()
}

fn spherical_front(theta: &[f64], radius: f64) -> Vec<f64> {
    let m = theta.len() + 1;
    (0..m)
        .map(|i| {
            let head: f64 = theta[..m - 1 - i].iter().map(|&t| cos(t)).product();
            let last = if i > 0 { sin(theta[m - 1 - i]) } else { 1.0 };
            radius * head * last
        })
        .collect()
}

fn dtlz7_h(f: &[f64], g: f64, m: usize) -> f64 {
    m as f64
        - f.iter()
            .map(|&v| v / (1.0 + g) * (1.0 + sin(3.0 * PI * v)))
            .sum::<f64>()
}

/// `count` simplex points: the smallest Das-Dennis lattice holding at least
/// `count` points, thinned evenly.
fn lattice(m: usize, count: usize) -> Result<Vec<Vec<f64>>> {
    let mut h = divisions_for(m, count.max(m));
    if lattice_size(m, h).is_some_and(|c| c < count as u64) {
        h += 1;
    }
    Ok(take_evenly(das_dennis(m, h)?.points().to_vec(), count))
}

/// Keeps `count` items at evenly spaced positions (all of them if fewer).
fn take_evenly<T>(items: Vec<T>, count: usize) -> Vec<T> {
    let n = items.len();
    if n <= count {
        return items;
    }
    let mut next = 0;
    let mut picked = 0;
    let mut out = Vec::with_capacity(count);
    for (i, item) in items.into_iter().enumerate() {
        if picked < count && i == next {
            out.push(item);
            picked += 1;
            next = picked * n / count;
        }
    }
    out
}

/// Oversamples with `make` until at least `count` candidates survive the
/// non-dominance filter, then thins them to `count`.
fn filtered_front(count: usize, make: impl Fn(usize) -> Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut budget = count + count / 4 + 1;
    loop {
        let pts = keep_nondominated(make(budget));
        if pts.len() >= count {
            return take_evenly(pts, count);
        }
        budget *= 2;
    }
}

fn grid(count: usize) -> Vec<f64> {
    match count {
        1 => vec![0.0],
        _ => (0..count).map(|i| i as f64 / (count - 1) as f64).collect(),
    }
}

fn curve(count: usize, lo: f64, hi: f64, f2: impl Fn(f64) -> f64) -> Vec<Vec<f64>> {
    grid(count)
        .into_iter()
        .map(|t| {
            let f1 = lo + t * (hi - lo);
            vec![f1, f2(f1)]
        })
        .collect()
}

/// Maps `t` in `[0, 1]` onto the union of disjoint intervals, by length.
fn onto_regions(t: f64, regions: &[(f64, f64)]) -> f64 {
    let total: f64 = regions.iter().map(|(a, b)| b - a).sum();
    let mut rest = t * total;
    for &(a, b) in regions {
        if rest <= b - a {
            return a + rest;
        }
        rest -= b - a;
    }
    regions[regions.len() - 1].1
}

fn zdt3_front(count: usize) -> Vec<Vec<f64>> {
    filtered_front(count, |n| {
        grid(n)
            .into_iter()
            .map(|t| {
                let f1 = onto_regions(t, &ZDT3_REGIONS);
                vec![f1, 1.0 - sqrt(f1) - f1 * sin(10.0 * PI * f1)]
            })
            .collect()
    })
}

/// DTLZ5/6 fronts collapse onto a curve from (0, .., 0, 1) to the unit
/// circle's diagonal in the first two objectives.
fn degenerate_curve(m: usize, count: usize) -> Vec<Vec<f64>> {
    grid(count)
        .into_iter()
        .map(|t| {
            let norm = sqrt(t * t + (1.0 - t) * (1.0 - t));
            let (a, b) = (t / norm, (1.0 - t) / norm);
            (0..m)
                .map(|i| {
                    let (v, power) = match i {
                        i if i == m - 1 => (b, 0),
                        0 => (a, m - 2),
                        i => (a, m - 1 - i),
                    };
                    v / pow(sqrt(2.0), power as f64)
                })
                .collect()
        })
        .collect()
}

fn dtlz7_front(m: usize, count: usize) -> Vec<Vec<f64>> {
    filtered_front(count, |n| dtlz7_grid(m, n))
}

/// Regular grid of at least `n` points over the DTLZ7 front regions.
fn dtlz7_grid(m: usize, n: usize) -> Vec<Vec<f64>> {
    let dims = (m - 1) as u32;
    let mut side = 1usize;
    while side.checked_pow(dims).is_some_and(|c| c < n) {
        side += 1;
    }
    let axis: Vec<f64> = grid(side)
        .into_iter()
        .map(|t| onto_regions(t, &DTLZ7_REGIONS))
        .collect();
    (0..side.pow(dims))
        .map(|mut code| {
            let mut f: Vec<f64> = (0..dims)
                .map(|_| {
                    let v = axis[code % side];
                    code /= side;
                    v
                })
                .collect();
            f.push(2.0 * dtlz7_h(&f, 1.0, m));
            f
        })
        .collect()
}

fn keep_nondominated(pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let keep = nondominated_indices(&pts);
    if keep.len() == pts.len() {
        return pts;
    }
    keep.into_iter().map(|i| pts[i].clone()).collect()
}

//! Quality indicators: IGD, GD and hypervolume.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use libm::sqrt;
use rand::Rng;

use crate::dominance::dominates;
use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// Largest objective count handled by the exact hypervolume.
pub const HV_EXACT_MAX_OBJ: usize = 3;

/// Default Monte Carlo sample count.
pub const HV_DEFAULT_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Indicator {
    Igd,
    Gd,
    Hv,
}

impl Indicator {
    pub const ALL: [Indicator; 3] = [Indicator::Igd, Indicator::Gd, Indicator::Hv];

    pub fn name(self) -> &'static str {
        match self {
            Indicator::Igd => "IGD",
            Indicator::Gd => "GD",
            Indicator::Hv => "HV",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|i| i.name().eq_ignore_ascii_case(name))
    }

    pub fn lower_is_better(self) -> bool {
        !matches!(self, Indicator::Hv)
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo { samples: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorResult {
    pub indicator: Indicator,
    pub value: f64,
    pub mode: Mode,
}

fn check_sets<A: AsRef<[f64]>, B: AsRef<[f64]>>(a: &[A], b: &[B]) -> Result<usize> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::usage("indicator sets must be non-empty"));
    }
    let m = a[0].as_ref().len();
    if a.iter().any(|p| p.as_ref().len() != m) || b.iter().any(|p| p.as_ref().len() != m) {
        return Err(Error::config(format!(
            "indicator sets must share one objective dimension ({m})"
        )));
    }
    Ok(m)
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Mean distance from each point of `from` to its nearest point in `to`.
fn mean_nearest<A: AsRef<[f64]>, B: AsRef<[f64]>>(from: &[A], to: &[B]) -> f64 {
    let total: f64 = from
        .iter()
        .map(|p| {
            to.iter()
                .map(|q| euclidean(p.as_ref(), q.as_ref()))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / from.len() as f64
}

/// Inverted generational distance of `solution` w.r.t. the `reference` front.
pub fn igd<A: AsRef<[f64]>, B: AsRef<[f64]>>(solution: &[A], reference: &[B]) -> Result<IndicatorResult> {
    check_sets(solution, reference)?;
    Ok(IndicatorResult {
        indicator: Indicator::Igd,
        value: mean_nearest(reference, solution),
        mode: Mode::Exact,
    })
}

/// Generational distance of `solution` w.r.t. the `reference` front.
pub fn gd<A: AsRef<[f64]>, B: AsRef<[f64]>>(solution: &[A], reference: &[B]) -> Result<IndicatorResult> {
    check_sets(solution, reference)?;
    Ok(IndicatorResult {
        indicator: Indicator::Gd,
        value: mean_nearest(solution, reference),
        mode: Mode::Exact,
    })
}

/// Points that strictly dominate `reference` in every component.
fn effective<V: AsRef<[f64]>>(points: &[V], reference: &[f64]) -> Result<Vec<Vec<f64>>> {
    if let Some(p) = points.iter().find(|p| p.as_ref().len() != reference.len()) {
        return Err(Error::config(format!(
            "point of dimension {} against a {}-dimensional reference point",
            p.as_ref().len(),
            reference.len()
        )));
    }
    Ok(points
        .iter()
        .map(AsRef::as_ref)
        .filter(|p| p.iter().zip(reference).all(|(v, r)| v < r))
        .map(<[f64]>::to_vec)
        .collect())
}

/// Exact hypervolume by slicing along the last objective and recursing.
/// Works in any dimension; cost grows quickly beyond three objectives.
pub fn hv_exact<V: AsRef<[f64]>>(points: &[V], reference: &[f64]) -> Result<f64> {
    if reference.is_empty() {
        return Err(Error::config("reference point must not be empty"));
    }
    let mut pts = effective(points, reference)?;
    Ok(slice_volume(&mut pts, reference))
}

fn slice_volume(pts: &mut [Vec<f64>], reference: &[f64]) -> f64 {
    let d = reference.len();
    if pts.is_empty() {
        return 0.0;
    }
    if d == 1 {
        let best = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        return reference[0] - best;
    }
    if d == 2 {
        return sweep_area(pts, reference);
    }
    let last = d - 1;
    pts.sort_by(|a, b| a[last].total_cmp(&b[last]));
    let mut volume = 0.0;
    let mut projected: Vec<Vec<f64>> = Vec::with_capacity(pts.len());
    for i in 0..pts.len() {
        let top = if i + 1 < pts.len() {
            pts[i + 1][last]
        } else {
            reference[last]
        };
        projected.push(pts[i][..last].to_vec());
        let height = top - pts[i][last];
        if height > 0.0 {
            let mut slab: Vec<Vec<f64>> = if last > 2 {
                // Pruning dominated points keeps deeper recursions small.
                projected
                    .iter()
                    .filter(|p| !projected.iter().any(|q| dominates(q, p)))
                    .cloned()
                    .collect()
            } else {
                projected.clone()
            };
            volume += height * slice_volume(&mut slab, &reference[..last]);
        }
    }
    volume
}

fn sweep_area(pts: &mut [Vec<f64>], reference: &[f64]) -> f64 {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut floor = reference[1];
    let mut area = 0.0;
    for p in pts.iter() {
        if p[1] < floor {
            area += (reference[0] - p[0]) * (floor - p[1]);
            floor = p[1];
        }
    }
    area
}

/// Monte Carlo hypervolume with `samples` uniform draws in the box spanned by
/// the component-wise minimum of the points and `reference`.
pub fn hv_monte_carlo<V: AsRef<[f64]>>(
    points: &[V],
    reference: &[f64],
    samples: usize,
    rng: &mut StreamRng,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::usage("Monte Carlo hypervolume needs at least one sample"));
    }
    let pts = effective(points, reference)?;
    if pts.is_empty() {
        return Ok(0.0);
    }
    let d = reference.len();
    let lower: Vec<f64> = (0..d)
        .map(|i| pts.iter().map(|p| p[i]).fold(f64::INFINITY, f64::min))
        .collect();
    let box_volume: f64 = lower.iter().zip(reference).map(|(l, r)| r - l).product();
    let mut sample = alloc::vec![0.0; d];
    let mut hits = 0usize;
    for _ in 0..samples {
        for i in 0..d {
            sample[i] = lower[i] + rng.random::<f64>() * (reference[i] - lower[i]);
        }
        if pts
            .iter()
            .any(|p| p.iter().zip(&sample).all(|(a, b)| a <= b))
        {
            hits += 1;
        }
    }
    Ok(box_volume * hits as f64 / samples as f64)
}

/// Hypervolume: exact up to [`HV_EXACT_MAX_OBJ`] objectives, Monte Carlo with
/// `samples` draws above that.
pub fn hv<V: AsRef<[f64]>>(
    solution: &[V],
    reference: &[f64],
    samples: usize,
    rng: &mut StreamRng,
) -> Result<IndicatorResult> {
    let (value, mode) = if reference.len() <= HV_EXACT_MAX_OBJ {
        (hv_exact(solution, reference)?, Mode::Exact)
    } else {
        (
            hv_monte_carlo(solution, reference, samples, rng)?,
            Mode::MonteCarlo { samples },
        )
    };
    Ok(IndicatorResult {
        indicator: Indicator::Hv,
        value,
        mode,
    })
}

/// `factor` times the component-wise maximum of `front`.
pub fn scaled_nadir<V: AsRef<[f64]>>(front: &[V], factor: f64) -> Result<Vec<f64>> {
    let first = front
        .first()
        .ok_or_else(|| Error::usage("cannot take the nadir of an empty set"))?;
    let m = first.as_ref().len();
    Ok((0..m)
        .map(|i| {
            factor
                * front
                    .iter()
                    .map(|p| p.as_ref()[i])
                    .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, RngSeed};
    use alloc::vec;

    const SQRT_HALF: f64 = core::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn igd_examples() {
        let reference = [[0.0, 1.0], [1.0, 0.0]];
        assert_eq!(igd(&reference, &reference).unwrap().value, 0.0);
        let v = igd(&[[0.0, 1.0]], &reference).unwrap().value;
        assert!((v - core::f64::consts::SQRT_2 / 2.0).abs() < 1e-12);
        let v = igd(&[[0.5, 0.5]], &reference).unwrap().value;
        assert!((v - SQRT_HALF).abs() < 1e-12);
    }

    #[test]
    fn gd_examples() {
        let reference = [[0.0, 1.0], [1.0, 0.0], [0.5, 0.5]];
        assert_eq!(gd(&[[0.0, 1.0]], &reference).unwrap().value, 0.0);
        let v = gd(&[[0.5, 0.5]], &[[0.0, 1.0], [1.0, 0.0]]).unwrap().value;
        assert!((v - SQRT_HALF).abs() < 1e-12);
    }

    #[test]
    fn distance_errors() {
        let empty: [[f64; 2]; 0] = [];
        assert!(matches!(igd(&empty, &[[0.0, 1.0]]), Err(Error::Usage(_))));
        assert!(matches!(gd(&[[0.0, 1.0]], &empty), Err(Error::Usage(_))));
        assert!(igd(&[vec![0.0]], &[vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn hv_examples() {
        assert_eq!(hv_exact(&[[0.5, 0.5]], &[1.0, 1.0]).unwrap(), 0.25);
        assert_eq!(hv_exact(&[[0.25, 0.75], [0.75, 0.25]], &[1.0, 1.0]).unwrap(), 0.3125);
        assert_eq!(hv_exact(&[[1.5, 0.5]], &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(hv_exact(&[[1.0, 0.5]], &[1.0, 1.0]).unwrap(), 0.0);
        let empty: [[f64; 2]; 0] = [];
        assert_eq!(hv_exact(&empty, &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(hv_exact(&[[0.5, 0.5, 0.5]], &[1.0, 1.0, 1.0]).unwrap(), 0.125);
        assert_eq!(hv_exact(&[[0.3], [0.5]], &[1.0]).unwrap(), 0.7);
    }

    #[test]
    fn hv_dispatches_on_dimension() {
        let mut rng = RngSeed::new(1).stream(Purpose::MonteCarlo);
        let r = hv(&[[0.5, 0.5, 0.5]], &[1.0, 1.0, 1.0], 10, &mut rng).unwrap();
        assert_eq!(r.mode, Mode::Exact);
        let r = hv(&[[0.5; 4]], &[1.0; 4], 20_000, &mut rng).unwrap();
        assert_eq!(r.mode, Mode::MonteCarlo { samples: 20_000 });
        // The sampling box is exactly the dominated box here.
        assert!((r.value - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn dominated_points_do_not_count() {
        let a = hv_exact(&[[0.3, 0.5], [0.6, 0.2]], &[1.0, 1.0]).unwrap();
        let b = hv_exact(&[[0.3, 0.5], [0.6, 0.2], [0.8, 0.7], [0.3, 0.8]], &[1.0, 1.0]).unwrap();
        assert!((a - 0.47).abs() < 1e-12);
        assert_eq!(a, b);
    }

    #[test]
    fn nadir_scaling() {
        let front = [[0.0, 1.0], [1.0, 0.0], [0.5, 0.5]];
        assert_eq!(scaled_nadir(&front, 1.1).unwrap(), vec![1.1, 1.1]);
    }

    #[test]
    fn indicator_names() {
        assert_eq!(Indicator::from_name("igd"), Some(Indicator::Igd));
        assert_eq!(Indicator::from_name("HV"), Some(Indicator::Hv));
        assert_eq!(Indicator::from_name("R2"), None);
        assert!(!Indicator::Hv.lower_is_better());
    }
}

mod common;

use proptest::prelude::*;
use temof_core::dominance::sort_points;
use temof_core::nsga3::{
    associate, das_dennis, divisions_for, environmental_selection, first_front_selection,
    lattice_size, normalize, NormalizationState,
};
use temof_core::population::merge_dedupe;
use temof_core::{Individual, Population, Purpose, RngSeed};

fn population(points: &[Vec<f64>]) -> Population {
    points
        .iter()
        .enumerate()
        .map(|(i, p)| Individual::evaluated(vec![i as f64], p.clone()))
        .collect()
}

fn ids(pop: &Population) -> Vec<usize> {
    pop.iter().map(|m| m.decision()[0] as usize).collect()
}

fn objective_sets(m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    let coord = prop_oneof![(0u8..5).prop_map(f64::from), 0.0f64..4.0];
    prop::collection::vec(prop::collection::vec(coord, m), 2..80)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn survivors_keep_whole_leading_fronts(
        (points, n, seed) in (2usize..=4)
            .prop_flat_map(|m| (objective_sets(m), 1usize..60, any::<u64>()))
    ) {
        let m = points[0].len();
        let refs = das_dennis(m, divisions_for(m, n.max(m))).unwrap();
        let mut state = NormalizationState::new();
        let mut rng = RngSeed::new(seed).stream(Purpose::Selection);
        let kept = environmental_selection(population(&points), n, &refs, &mut state, &mut rng).unwrap();
        let kept = ids(&kept);
        prop_assert_eq!(kept.len(), n.min(points.len()));
        prop_assert!(kept.windows(2).all(|w| w[0] < w[1]));

        let mut covered = 0;
        for front in common::peel_fronts(&points) {
            let inside = front.iter().filter(|i| kept.contains(i)).count();
            if covered + front.len() <= kept.len() {
                prop_assert_eq!(inside, front.len());
            } else {
                prop_assert_eq!(inside, kept.len() - covered);
                // Nothing from later fronts.
                break;
            }
            covered += front.len();
        }
    }

    #[test]
    fn first_front_selection_keeps_only_front_one(
        (points, n, seed) in (2usize..=4)
            .prop_flat_map(|m| (objective_sets(m), 1usize..60, any::<u64>()))
    ) {
        let m = points[0].len();
        let refs = das_dennis(m, divisions_for(m, n.max(m))).unwrap();
        let mut state = NormalizationState::new();
        let mut rng = RngSeed::new(seed).stream(Purpose::Selection);
        let kept = first_front_selection(population(&points), n, &refs, &mut state, &mut rng).unwrap();
        let front = common::peel_fronts(&points).swap_remove(0);
        let kept = ids(&kept);
        prop_assert_eq!(kept.len(), n.min(front.len()));
        prop_assert!(kept.iter().all(|i| front.contains(i)));
    }

    #[test]
    fn association_matches_exhaustive_scan(
        points in prop::collection::vec(prop::collection::vec(0.0f64..2.0, 3), 1..40),
        h in 1usize..8,
    ) {
        let refs = das_dennis(3, h).unwrap();
        for (p, a) in points.iter().zip(associate(&points, &refs)) {
            // |p|^2 - (p.w)^2/|w|^2, an algebraically equivalent distance.
            let dist = |w: &[f64]| {
                let pp: f64 = p.iter().map(|x| x * x).sum();
                let pw: f64 = p.iter().zip(w).map(|(x, y)| x * y).sum();
                let ww: f64 = w.iter().map(|x| x * x).sum();
                (pp - pw * pw / ww).max(0.0).sqrt()
            };
            let best = refs.points().iter().map(|w| dist(w)).fold(f64::INFINITY, f64::min);
            prop_assert!((a.distance - best).abs() < 1e-9);
            prop_assert!((dist(&refs.points()[a.reference]) - best).abs() < 1e-9);
        }
    }

    #[test]
    fn normalized_population_has_zero_ideal(
        points in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 3..40)
    ) {
        let mut state = NormalizationState::new();
        let norm = normalize(&points, &mut state);
        for k in 0..3 {
            let min = norm.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
            prop_assert!(min.abs() < 1e-12);
        }
        prop_assert!(state.intercepts().iter().all(|a| *a > 0.0 && a.is_finite()));
    }

    #[test]
    fn merge_dedupe_is_a_duplicate_free_union(
        a in prop::collection::vec((0u8..6, 0u8..3), 0..20),
        b in prop::collection::vec((0u8..6, 0u8..3), 0..20),
    ) {
        let to_pop = |v: &[(u8, u8)]| -> Population {
            v.iter().map(|&(x, y)| Individual::new(vec![f64::from(x), f64::from(y)])).collect()
        };
        let merged = merge_dedupe(to_pop(&a), to_pop(&b)).unwrap();
        let decisions: Vec<Vec<f64>> = merged.iter().map(|m| m.decision().to_vec()).collect();
        for (i, d) in decisions.iter().enumerate() {
            prop_assert!(!decisions[..i].contains(d));
        }
        for &(x, y) in a.iter().chain(&b) {
            prop_assert!(decisions.contains(&vec![f64::from(x), f64::from(y)]));
        }
    }
}

#[test]
fn das_dennis_counts_and_simplex() {
    for m in 2..=6 {
        for h in 1..=8 {
            let refs = das_dennis(m, h).unwrap();
            assert_eq!(refs.len() as u64, lattice_size(m, h).unwrap());
            for w in refs.points() {
                assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                assert!(w.iter().all(|v| *v >= 0.0));
            }
        }
    }
    let refs = das_dennis(3, 12).unwrap();
    assert_eq!(refs.len(), 91);
    assert_eq!(divisions_for(3, 92), 12);
    assert_eq!(divisions_for(3, 100), 12);
}

#[test]
fn survivors_of_the_first_front_are_spread() {
    // 40 points on the 2-objective line: 10 survivors should cover distinct niches.
    let points: Vec<Vec<f64>> = (0..40)
        .map(|i| {
            let t = i as f64 / 39.0;
            vec![t, 1.0 - t]
        })
        .collect();
    let refs = das_dennis(2, 9).unwrap();
    let mut state = NormalizationState::new();
    let mut rng = RngSeed::new(3).stream(Purpose::Selection);
    let kept = environmental_selection(population(&points), 10, &refs, &mut state, &mut rng).unwrap();
    let niches: Vec<usize> = associate(
        &normalize(&kept.objectives().unwrap(), &mut NormalizationState::new()),
        &refs,
    )
    .iter()
    .map(|a| a.reference)
    .collect();
    let mut distinct = niches.clone();
    distinct.sort_unstable();
    distinct.dedup();
    assert_eq!(distinct.len(), 10);
    assert!(sort_points(&kept.objectives().unwrap()).unwrap().len() == 1);
}

use temof_core::benchmarks::{make_problem, Family};
use temof_core::dominance::nondominated_indices;
use temof_core::Problem;

/// Decision vector with position `t` (length M-1 or 1) and an optimal tail.
fn optimal(problem: &dyn Problem, family: Family, t: &[f64]) -> Vec<f64> {
    let n = problem.n_var();
    let tail = match family {
        Family::Zdt1 | Family::Zdt2 | Family::Zdt3 | Family::Zdt4 | Family::Zdt6 => 0.0,
        _ => 0.5,
    };
    let mut x = vec![tail; n];
    x[..t.len()].copy_from_slice(t);
    x
}

#[test]
fn optimal_decisions_land_on_the_sampled_geometry() {
    let grid = [0.0, 0.13, 0.5, 0.77, 1.0];
    for &m in &[2usize, 3, 5] {
        for family in [Family::Dtlz1, Family::Dtlz2, Family::Dtlz3, Family::Dtlz4] {
            let p = make_problem(family.name(), None, m).unwrap();
            for &t in &grid {
                let f = p.evaluate(&optimal(&p, family, &vec![t; m - 1]));
                if family == Family::Dtlz1 {
                    assert!((f.iter().sum::<f64>() - 0.5).abs() < 1e-12);
                } else {
                    assert!((f.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
                }
            }
            for s in p.sample_front(200).unwrap() {
                let target = if family == Family::Dtlz1 { 0.5 } else { 1.0 };
                let value = if family == Family::Dtlz1 {
                    s.iter().sum::<f64>()
                } else {
                    s.iter().map(|v| v * v).sum::<f64>()
                };
                assert!((value - target).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn zdt_optimal_curves() {
    for family in [Family::Zdt1, Family::Zdt2, Family::Zdt4] {
        let p = make_problem(family.name(), None, 2).unwrap();
        for t in [0.0, 0.2, 0.6, 1.0] {
            let f = p.evaluate(&optimal(&p, family, &[t]));
            let expected = match family {
                Family::Zdt2 => 1.0 - t * t,
                _ => 1.0 - t.sqrt(),
            };
            assert!((f[0] - t).abs() < 1e-12 && (f[1] - expected).abs() < 1e-12);
        }
        let front = p.sample_front(500).unwrap();
        assert_eq!(front.len(), 500);
        assert_eq!(nondominated_indices(&front).len(), 500);
    }
}

#[test]
fn disconnected_fronts_are_non_dominated() {
    for (name, m) in [("ZDT3", 2), ("DTLZ7", 3), ("DTLZ7", 2)] {
        let p = make_problem(name, None, m).unwrap();
        let front = p.sample_front(1000).unwrap();
        assert!(!front.is_empty());
        assert_eq!(nondominated_indices(&front).len(), front.len(), "{name}");
    }
}

#[test]
fn every_family_is_registered() {
    for family in Family::ALL {
        let m = family.default_n_obj();
        let p = make_problem(&family.name().to_lowercase(), None, m).unwrap();
        assert_eq!(p.n_var(), family.default_n_var(m));
        let x: Vec<f64> = p.bounds().lower().iter().zip(p.bounds().upper()).map(|(l, u)| 0.5 * (l + u)).collect();
        let f = p.evaluate(&x);
        assert_eq!(f.len(), m);
        assert!(f.iter().all(|v| v.is_finite()));
        assert!(!p.sample_front(100).unwrap().is_empty());
    }
    assert!(make_problem("MaOP1", None, 3).is_err());
}

#[test]
fn samplers_return_the_requested_count() {
    for family in Family::ALL {
        for m in [2usize, 3, 4] {
            let Ok(p) = make_problem(family.name(), None, m) else { continue };
            for count in [1usize, 7, 91, 250] {
                let front = p.sample_front(count).unwrap();
                assert_eq!(front.len(), count, "{} M={m} count={count}", family.name());
                assert_eq!(nondominated_indices(&front).len(), count, "{}", family.name());
            }
        }
    }
}

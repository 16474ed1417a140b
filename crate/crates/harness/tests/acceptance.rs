//! Acceptance suite: one `[PASS]` / `[FAIL]` line per criterion, nonzero
//! exit status if any criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng;
use temof_core::benchmarks::make_problem;
use temof_core::dominance::sort_points;
use temof_core::metrics::{hv_exact, hv_monte_carlo, igd, Indicator};
use temof_core::nsga3::{das_dennis, Nsga3Selection};
use temof_core::stats::{ranksum_mark, signed_rank, Aggregate, Mark, Orientation};
use temof_core::temof::{baseline_run, temof_run, FrameworkConfig, MatingSource};
use temof_core::variation::VariationParams;
use temof_core::{Problem, Purpose, RngSeed, StreamRng};
use temof_harness::config::{AlgorithmEntry, AlgorithmKind, ExperimentConfig, ProblemEntry, SeedSpec};
use temof_harness::records::RUNS_FILE;
use temof_harness::report::{rank_report, summarize, write_ranks, Results};
use temof_harness::run_matrix;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    check(elapsed <= Duration::from_secs(limit_s), || {
        format!("took {:.1} s, limit {limit_s} s", elapsed.as_secs_f64())
    })
}

fn rng(seed: u64) -> StreamRng {
    RngSeed::new(seed).stream(Purpose::Initialization)
}

// Oracles ------------------------------------------------------------------

fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}

fn peel(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| dominates(&points[j], &points[i])))
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

fn ranksum_enumerated(a: &[f64], b: &[f64]) -> f64 {
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let n = pooled.len();
    let obs: usize = a
        .iter()
        .map(|x| pooled.iter().position(|v| v == x).unwrap() + 1)
        .sum();
    // Twice the centre keeps the comparison in integers.
    let centre2 = a.len() * (n + 1);
    let dev = |w: usize| (2 * w).abs_diff(centre2);
    let (mut hit, mut all) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        let w: usize = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).sum();
        all += 1;
        if dev(w) >= dev(obs) {
            hit += 1;
        }
    }
    hit as f64 / all as f64
}

fn signed_rank_enumerated(d: &[f64]) -> (f64, f64) {
    let n = d.len();
    let rank = |x: f64| {
        let below = d.iter().filter(|y| y.abs() < x.abs()).count() as f64;
        let tied = d.iter().filter(|y| y.abs() == x.abs()).count() as f64;
        below + (tied + 1.0) / 2.0
    };
    let ranks: Vec<f64> = d.iter().map(|&x| rank(x)).collect();
    let obs: f64 = ranks.iter().zip(d).filter(|(_, x)| **x > 0.0).map(|(r, _)| r).sum();
    let centre = (n * (n + 1)) as f64 / 4.0;
    let mut hit = 0u64;
    for mask in 0u32..(1 << n) {
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if (s - centre).abs() >= (obs - centre).abs() - 1e-9 {
            hit += 1;
        }
    }
    (obs, hit as f64 / (1u64 << n) as f64)
}

// Criteria -----------------------------------------------------------------

fn c1_sort_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(101);
    let mut largest = 0;
    for instance in 0..200 {
        let n = r.random_range(1..=200);
        let m = r.random_range(2..=7);
        let coarse = r.random_bool(0.5);
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        if coarse {
                            f64::from(r.random_range(0u8..5))
                        } else {
                            r.random::<f64>()
                        }
                    })
                    .collect()
            })
            .collect();
        largest = largest.max(n);
        let fronts = sort_points(&points).map_err(|e| e.to_string())?.into_fronts();
        check(fronts == peel(&points), || format!("instance {instance} (n={n}, M={m}) differs"))?;
    }
    within(start.elapsed(), 30)?;
    Ok(format!(
        "200 instances up to n={largest}, 2-7 objectives, {:.1} s",
        start.elapsed().as_secs_f64()
    ))
}

fn c2_hv_cross_validation() -> Outcome {
    let start = Instant::now();
    let mut r = rng(202);
    let mut mc = RngSeed::new(203).stream(Purpose::MonteCarlo);
    let reference = [1.1; 3];
    let mut worst: f64 = 0.0;
    for set in 0..50 {
        let n = r.random_range(1..=20);
        let points: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| r.random::<f64>()).collect()).collect();
        let exact = hv_exact(&points, &reference).map_err(|e| e.to_string())?;
        let approx = hv_monte_carlo(&points, &reference, 1_000_000, &mut mc).map_err(|e| e.to_string())?;
        let rel = (approx - exact).abs() / exact;
        worst = worst.max(rel);
        check(rel <= 0.01, || format!("set {set}: exact {exact}, MC {approx} ({:.3}%)", 100.0 * rel))?;
    }
    let hand: [(&[[f64; 2]], f64); 2] = [(&[[0.5, 0.5]], 0.25), (&[[0.25, 0.75], [0.75, 0.25]], 0.3125)];
    for (points, expected) in hand {
        let exact = hv_exact(points, &[1.0, 1.0]).map_err(|e| e.to_string())?;
        check((exact - expected).abs() <= 1e-12, || format!("exact {exact} != {expected}"))?;
        let approx = hv_monte_carlo(points, &[1.0, 1.0], 1_000_000, &mut mc).map_err(|e| e.to_string())?;
        check((approx - expected).abs() / expected <= 0.01, || format!("MC {approx} vs {expected}"))?;
    }
    within(start.elapsed(), 60)?;
    Ok(format!(
        "50 sets, worst relative gap {:.3}%, hand cases 0.25 / 0.3125 exact, {:.1} s",
        100.0 * worst,
        start.elapsed().as_secs_f64()
    ))
}

fn c3_reference_points() -> Outcome {
    let refs = das_dennis(3, 12).map_err(|e| e.to_string())?;
    check(refs.len() == 91, || format!("{} points", refs.len()))?;
    let worst = refs
        .points()
        .iter()
        .map(|w| (w.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    check(worst <= 1e-9, || format!("simplex deviation {worst}"))?;
    check(refs.points().iter().flatten().all(|v| *v >= 0.0), || "negative coordinate".into())?;
    Ok(format!("91 points, max simplex deviation {worst:.1e}"))
}

fn c4_structural_invariants() -> Outcome {
    let start = Instant::now();
    let problem = make_problem("DTLZ2", None, 3).map_err(|e| e.to_string())?;
    let variation = VariationParams::default();
    let mut archive_events = 0;
    let mut generations = 0;
    for (p, seeds) in [(0.5, [1u64, 2, 3]), (0.0, [1, 2, 3])] {
        let cfg = FrameworkConfig {
            population_size: 100,
            max_fes: 20_000,
            archive_prob: p,
            ..FrameworkConfig::default()
        };
        for seed in seeds {
            let mut sel = Nsga3Selection::for_population(3, 100).map_err(|e| e.to_string())?;
            let mut violation: Option<String> = None;
            let out = temof_run(&problem, &cfg, &variation, &mut sel, RngSeed::new(seed), |view| {
                if violation.is_some() {
                    return;
                }
                let g = view.record.generation;
                if view.population.len() != 100 {
                    violation = Some(format!("(b) generation {g}: |Population| = {}", view.population.len()));
                }
                let objs = view.archive.map(|a| a.objectives().unwrap()).unwrap_or_default();
                if objs.iter().any(|a| objs.iter().any(|b| dominates(b, a))) {
                    violation = Some(format!("(a) generation {g}: archive holds a dominated member"));
                }
                if view.record.source == MatingSource::FromArchive {
                    if view.record.fes < 10_000 {
                        violation = Some(format!("(c) archive mating at FEs = {}", view.record.fes));
                    }
                    if p == 0.0 {
                        violation = Some(format!("(d) archive mating with p = 0 at generation {g}"));
                    }
                }
            })
            .map_err(|e| e.to_string())?;
            if let Some(v) = violation {
                return Err(format!("p={p}, seed {seed}: {v}"));
            }
            generations += out.trace.generations();
            if p > 0.0 {
                archive_events += out.trace.archive_generations();
            }
        }
    }
    check(archive_events > 0, || "p = 0.5 never mated from the archive".into())?;
    within(start.elapsed(), 120)?;
    Ok(format!(
        "6 runs, {generations} generations checked, {archive_events} archive matings (p=0.5, all at FEs >= 10000), none with p=0, {:.1} s",
        start.elapsed().as_secs_f64()
    ))
}

fn c5_nsga3_regression() -> Outcome {
    let start = Instant::now();
    let problem = make_problem("DTLZ2", None, 3).map_err(|e| e.to_string())?;
    let front = problem.sample_front(10_000).map_err(|e| e.to_string())?;
    let cfg = FrameworkConfig {
        population_size: 92,
        max_fes: 25_000,
        ..FrameworkConfig::default()
    };
    let mut values = Vec::new();
    for seed in 1..=5u64 {
        let mut sel = Nsga3Selection::for_population(3, 92).map_err(|e| e.to_string())?;
        check(sel.references().len() == 91, || format!("{} reference points", sel.references().len()))?;
        let out = baseline_run(&problem, &cfg, &VariationParams::default(), &mut sel, RngSeed::new(seed), |_| {})
            .map_err(|e| e.to_string())?;
        let objs = out.population.objectives().map_err(|e| e.to_string())?;
        values.push(igd(&objs, &front).map_err(|e| e.to_string())?.value);
    }
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[2];
    check(median <= 0.08, || format!("median IGD {median:.4} > 0.08 ({values:.4?})"))?;
    within(start.elapsed(), 180)?;
    Ok(format!(
        "median IGD {median:.4} <= 0.08 over 5 seeds ({} front points), {:.1} s",
        front.len(),
        start.elapsed().as_secs_f64()
    ))
}

fn pipeline_config(dir: &Path) -> ExperimentConfig {
    let problems = ["DTLZ1", "DTLZ2", "DTLZ3", "ZDT1", "ZDT4"]
        .into_iter()
        .map(ProblemEntry::named)
        .collect();
    let mut cfg = ExperimentConfig::new(
        problems,
        vec![
            AlgorithmEntry::of_kind(AlgorithmKind::TemofNsga3),
            AlgorithmEntry::of_kind(AlgorithmKind::Nsga3),
        ],
    );
    cfg.seeds = SeedSpec::Derived { master: 2024, runs: 11 };
    cfg.max_fes = 20_000;
    cfg.output = dir.to_owned();
    cfg
}

fn c6_pipeline(dir: &Path) -> Outcome {
    let start = Instant::now();
    let cfg = pipeline_config(dir);
    let outcome = run_matrix(&cfg, None).map_err(|e| e.to_string())?;
    check(outcome.failures.is_empty(), || format!("{} failed runs", outcome.failures.len()))?;
    check(outcome.executed.len() == 110, || format!("{} runs", outcome.executed.len()))?;
    let results = Results::load(dir).map_err(|e| e.to_string())?;
    let table = summarize(&results, Indicator::Igd, "nsga3", 0.05, Aggregate::Mean).map_err(|e| e.to_string())?;
    let (md, _) = table.write(dir).map_err(|e| e.to_string())?;

    let cell = |s: &str| {
        let ok_num = |t: &str| {
            let (m, e) = t.split_once('e').unwrap_or(("", ""));
            m.len() == 3 + usize::from(m.starts_with('-'))
                && m.parse::<f64>().is_ok()
                && (e.starts_with('+') || e.starts_with('-'))
                && e[1..].parse::<u32>().is_ok()
        };
        let mut parts = s.split(' ');
        let mean = parts.next().unwrap_or("");
        let std = parts.next().unwrap_or("");
        ok_num(mean) && std.starts_with('(') && std.ends_with(')') && ok_num(&std[1..std.len() - 1])
    };
    for (p, row) in table.problems.iter().zip(&table.cells) {
        for c in row {
            let c = c.as_ref().ok_or_else(|| format!("{p}: missing cell"))?;
            check(cell(&c.text()), || format!("{p}: malformed cell `{}`", c.text()))?;
        }
        check(row[0].as_ref().and_then(|c| c.mark).is_some(), || format!("{p}: no rank-sum mark"))?;
    }
    let counts = table.counts[0].ok_or("no footer")?;
    check(counts.total() == 5, || format!("footer {} covers {} problems", counts.text(), counts.total()))?;
    let sr = table.signed_rank[0].ok_or("no signed-rank line")?;
    check(sr.r_plus + sr.r_minus == (sr.n_effective * (sr.n_effective + 1)) as f64 / 2.0, || {
        "signed-rank mass identity".into()
    })?;
    let md_text = std::fs::read_to_string(&md).map_err(|e| e.to_string())?;
    check(md_text.contains("+/-/=") && md_text.contains("R+/R-/p"), || "markdown lacks footer lines".into())?;
    let ranks = rank_report(&results, &results.metrics(), Aggregate::Mean).map_err(|e| e.to_string())?;
    let ranks_path = write_ranks(dir, &ranks).map_err(|e| e.to_string())?;
    check(ranks.len() == 6 && ranks_path.exists(), || format!("{} rank rows", ranks.len()))?;
    within(start.elapsed(), 900)?;

    println!("{}", table.to_markdown());
    for r in &ranks {
        println!("    Friedman {} {}: {:.2}", r.metric, r.algorithm, r.mean_rank);
    }
    let at_least_equal = counts.better + counts.equal;
    Ok(format!(
        "110 runs, IGD footer +/-/= {} (TEMOF-NSGA-III >= NSGA-III on {at_least_equal}/5, reported only), R+={:.1} R-={:.1} p={:.3}, {:.1} s",
        counts.text(),
        sr.r_plus,
        sr.r_minus,
        sr.p_value,
        start.elapsed().as_secs_f64()
    ))
}

fn c7_statistics_oracles() -> Outcome {
    let start = Instant::now();
    let mut r = rng(707);
    let mut cases = 0;
    for n1 in 2..=10 {
        for n2 in 2..=(12 - n1) {
            for _ in 0..10 {
                let mut pool: Vec<f64> = (0..n1 + n2).map(|i| i as f64 + r.random::<f64>() * 0.5).collect();
                for i in (1..pool.len()).rev() {
                    pool.swap(i, r.random_range(0..=i));
                }
                let (a, b) = pool.split_at(n1);
                let m = ranksum_mark(a, b, 0.05, Orientation::LowerIsBetter).map_err(|e| e.to_string())?;
                let want = ranksum_enumerated(a, b);
                check(m.exact && (m.p_value - want).abs() < 1e-12, || {
                    format!("rank-sum n1={n1} n2={n2}: p {} vs enumeration {want}", m.p_value)
                })?;
                cases += 1;
            }
        }
    }
    for n in 2..=10 {
        for _ in 0..30 {
            let d: Vec<f64> = (0..n)
                .map(|_| {
                    let mag = f64::from(r.random_range(1u8..=6));
                    if r.random_bool(0.5) { mag } else { -mag }
                })
                .collect();
            let zeros = vec![0.0; n];
            let got = signed_rank(&d, &zeros, Orientation::HigherIsBetter).map_err(|e| e.to_string())?;
            let (r_plus, p) = signed_rank_enumerated(&d);
            check((got.r_plus - r_plus).abs() < 1e-9 && (got.p_value - p).abs() < 1e-12, || {
                format!("signed-rank {d:?}: ({}, {}) vs ({r_plus}, {p})", got.r_plus, got.p_value)
            })?;
            cases += 1;
        }
    }
    let a: Vec<f64> = (1..=10).map(f64::from).collect();
    let b: Vec<f64> = a.iter().map(|x| 2.0 * x + 1.0).collect();
    let sr = signed_rank(&a, &b, Orientation::LowerIsBetter).map_err(|e| e.to_string())?;
    check(sr.r_plus == 55.0 && sr.r_minus == 0.0, || format!("R+={} R-={}", sr.r_plus, sr.r_minus))?;
    check((sr.p_value - 0.001953).abs() < 5e-7, || format!("p = {}", sr.p_value))?;
    let small = ranksum_mark(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], 0.05, Orientation::LowerIsBetter)
        .map_err(|e| e.to_string())?;
    check((small.p_value - 0.1).abs() < 1e-12 && small.mark == Mark::Equal, || format!("{small:?}"))?;
    within(start.elapsed(), 10)?;
    Ok(format!(
        "{cases} cases against enumeration, (55, 0, n=10) -> p={:.6}, {:.1} s",
        sr.p_value,
        start.elapsed().as_secs_f64()
    ))
}

fn indicator_columns(dir: &Path) -> Result<Vec<String>, String> {
    let mut reader = csv::Reader::from_path(dir.join(RUNS_FILE)).map_err(|e| e.to_string())?;
    reader
        .records()
        .map(|r| {
            let r = r.map_err(|e| e.to_string())?;
            // Everything but wall time.
            Ok(r.iter().take(6).collect::<Vec<_>>().join(","))
        })
        .collect()
}

fn c8_determinism(first: &Path, second: &Path) -> Outcome {
    let start = Instant::now();
    let outcome = run_matrix(&pipeline_config(second), None).map_err(|e| e.to_string())?;
    check(outcome.failures.is_empty(), || "failed runs".into())?;
    let (a, b) = (indicator_columns(first)?, indicator_columns(second)?);
    check(!a.is_empty(), || "first execution produced no rows".into())?;
    check(a == b, || {
        let i = a.iter().zip(&b).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len()));
        format!("row {i} differs")
    })?;
    Ok(format!(
        "{} rows byte-identical across two executions, {:.1} s",
        a.len(),
        start.elapsed().as_secs_f64()
    ))
}

fn main() {
    let first = tempfile::tempdir().expect("temp dir");
    let second = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion<'_>> = vec![
        ("1 dominance-sort oracle equivalence", Box::new(c1_sort_oracle)),
        ("2 HV exact vs Monte Carlo", Box::new(c2_hv_cross_validation)),
        ("3 reference-point count", Box::new(c3_reference_points)),
        ("4 framework structural invariants", Box::new(c4_structural_invariants)),
        ("5 NSGA-III DTLZ2 regression", Box::new(c5_nsga3_regression)),
        ("6 framework comparison pipeline", Box::new(|| c6_pipeline(first.path()))),
        ("7 statistics oracle equivalence", Box::new(c7_statistics_oracles)),
        ("8 determinism", Box::new(|| c8_determinism(first.path(), second.path()))),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

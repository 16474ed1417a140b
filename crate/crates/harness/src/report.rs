//! Comparison tables and Friedman ranking files built from `runs.csv`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use temof_core::metrics::Indicator;
use temof_core::stats::{
    friedman_ranks, mean, ranksum_mark, sample_std, signed_rank, Aggregate, ComparisonMark, Mark,
    Orientation, SignedRankResult,
};

use crate::error::{HarnessError, Result};
use crate::records::{read_rows, write_rows, Metadata, RunRow, RUNS_FILE};

/// Placeholder for a cell without runs.
pub const MISSING: &str = "\u{2014}";

pub fn orientation(metric: Indicator) -> Orientation {
    if metric.lower_is_better() {
        Orientation::LowerIsBetter
    } else {
        Orientation::HigherIsBetter
    }
}

/// Scientific notation with a one-digit fraction and signed exponent:
/// `14.3` becomes `1.4e+1`.
pub fn format_sci(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.1e}");
    match s.split_once('e') {
        Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
        _ => s,
    }
}

/// `"mean (std)"` cell text.
pub fn format_cell(mean: f64, std: f64) -> String {
    format!("{} ({})", format_sci(mean), format_sci(std))
}

/// Raw runs plus, when present, the run metadata that fixes row and column order.
#[derive(Debug, Clone)]
pub struct Results {
    pub rows: Vec<RunRow>,
    pub metadata: Option<Metadata>,
}

impl Results {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(RUNS_FILE);
        if !path.exists() {
            return Err(HarnessError::Report(format!("no {RUNS_FILE} in {}", dir.display())));
        }
        Ok(Self {
            rows: read_rows(&path)?,
            metadata: Metadata::read(dir)?,
        })
    }

    pub fn from_rows(rows: Vec<RunRow>) -> Self {
        Self { rows, metadata: None }
    }

    fn first_seen(&self, f: impl Fn(&RunRow) -> &str) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.iter().any(|x| x == f(r)) {
                out.push(f(r).to_owned());
            }
        }
        out
    }

    pub fn problems(&self) -> Vec<String> {
        match &self.metadata {
            Some(m) => m.config.problems.iter().map(|p| p.label()).collect(),
            None => self.first_seen(|r| &r.problem),
        }
    }

    pub fn algorithms(&self) -> Vec<String> {
        match &self.metadata {
            Some(m) => m.config.algorithms.iter().map(|a| a.label()).collect(),
            None => self.first_seen(|r| &r.algorithm),
        }
    }

    pub fn metrics(&self) -> Vec<Indicator> {
        let mut out: Vec<Indicator> = Vec::new();
        for r in &self.rows {
            if let Some(i) = Indicator::from_name(&r.metric) {
                if !out.contains(&i) {
                    out.push(i);
                }
            }
        }
        out
    }

    pub fn aggregate(&self) -> Aggregate {
        self.metadata
            .as_ref()
            .map(|m| m.config.aggregate.into())
            .unwrap_or_default()
    }

    /// Values of one metric keyed by (problem, algorithm), in seed order.
    pub fn samples(&self, metric: Indicator) -> HashMap<(String, String), Vec<f64>> {
        let mut out: HashMap<(String, String), Vec<(u64, f64)>> = HashMap::new();
        for r in self.rows.iter().filter(|r| Indicator::from_name(&r.metric) == Some(metric)) {
            out.entry((r.problem.clone(), r.algorithm.clone()))
                .or_default()
                .push((r.seed, r.value));
        }
        out.into_iter()
            .map(|(k, mut v)| {
                v.sort_by_key(|(s, _)| *s);
                (k, v.into_iter().map(|(_, x)| x).collect())
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub mean: f64,
    pub std: f64,
    pub runs: usize,
    /// Aggregate score fed to the cross-problem tests.
    pub score: f64,
    /// Rank-sum result against the base; `None` for the base column or
    /// when either sample has fewer than two runs.
    pub mark: Option<ComparisonMark>,
    pub best: bool,
}

impl Cell {
    pub fn text(&self) -> String {
        let mut s = format_cell(self.mean, self.std);
        if let Some(m) = &self.mark {
            s.push(' ');
            s.push_str(m.mark.symbol());
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MarkCounts {
    pub better: usize,
    pub worse: usize,
    pub equal: usize,
}

impl MarkCounts {
    pub fn total(&self) -> usize {
        self.better + self.worse + self.equal
    }

    pub fn text(&self) -> String {
        format!("{}/{}/{}", self.better, self.worse, self.equal)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryTable {
    pub metric: Indicator,
    pub alpha: f64,
    pub base: String,
    /// Column order; the base algorithm comes last.
    pub algorithms: Vec<String>,
    pub problems: Vec<String>,
    /// `cells[problem][algorithm]`.
    pub cells: Vec<Vec<Option<Cell>>>,
    /// Per algorithm; `None` for the base.
    pub counts: Vec<Option<MarkCounts>>,
    /// Signed-rank over per-problem scores against the base; `None` for the
    /// base or with fewer than two paired problems.
    pub signed_rank: Vec<Option<SignedRankResult>>,
}

/// Builds the comparison table of `metric` against `base`.
pub fn summarize(results: &Results, metric: Indicator, base: &str, alpha: f64, aggregate: Aggregate) -> Result<SummaryTable> {
    let mut algorithms = results.algorithms();
    let Some(base_pos) = algorithms.iter().position(|a| a == base) else {
        return Err(HarnessError::Report(format!(
            "base algorithm `{base}` not among {}",
            algorithms.join(", ")
        )));
    };
    if algorithms.len() < 2 {
        return Err(HarnessError::Report("a comparison needs at least two algorithms".into()));
    }
    let base_name = algorithms.remove(base_pos);
    algorithms.push(base_name);
    let problems = results.problems();
    let samples = results.samples(metric);
    if samples.is_empty() {
        return Err(HarnessError::Report(format!("no {metric} values recorded")));
    }
    let orient = orientation(metric);
    let base_idx = algorithms.len() - 1;

    let mut cells = Vec::with_capacity(problems.len());
    for p in &problems {
        let base_sample = samples.get(&(p.clone(), base.to_owned())).filter(|v| !v.is_empty());
        let mut row: Vec<Option<Cell>> = Vec::with_capacity(algorithms.len());
        for (j, a) in algorithms.iter().enumerate() {
            let Some(v) = samples.get(&(p.clone(), a.clone())).filter(|v| !v.is_empty()) else {
                row.push(None);
                continue;
            };
            let mark = match base_sample {
                Some(b) if j != base_idx && v.len() >= 2 && b.len() >= 2 => {
                    Some(ranksum_mark(v, b, alpha, orient)?)
                }
                _ => None,
            };
            row.push(Some(Cell {
                mean: mean(v),
                std: sample_std(v),
                runs: v.len(),
                score: aggregate.apply(v),
                mark,
                best: false,
            }));
        }
        let best = row
            .iter()
            .flatten()
            .map(|c| c.mean)
            .reduce(|x, y| if orient.better(y, x) { y } else { x });
        if let Some(best) = best {
            for c in row.iter_mut().flatten() {
                c.best = c.mean == best;
            }
        }
        cells.push(row);
    }

    let mut counts = Vec::with_capacity(algorithms.len());
    let mut ranks = Vec::with_capacity(algorithms.len());
    for j in 0..algorithms.len() {
        if j == base_idx {
            counts.push(None);
            ranks.push(None);
            continue;
        }
        let mut c = MarkCounts::default();
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for row in &cells {
            if let Some(m) = row[j].as_ref().and_then(|cell| cell.mark) {
                match m.mark {
                    Mark::Better => c.better += 1,
                    Mark::Worse => c.worse += 1,
                    Mark::Equal => c.equal += 1,
                }
            }
            if let (Some(x), Some(y)) = (&row[j], &row[base_idx]) {
                xs.push(x.score);
                ys.push(y.score);
            }
        }
        counts.push(Some(c));
        ranks.push(if xs.len() >= 2 {
            Some(signed_rank(&xs, &ys, orient)?)
        } else {
            None
        });
    }

    Ok(SummaryTable {
        metric,
        alpha,
        base: base.to_owned(),
        algorithms,
        problems,
        cells,
        counts,
        signed_rank: ranks,
    })
}

fn signed_rank_text(r: &SignedRankResult) -> String {
    format!("{:.1}/{:.1}/{}", r.r_plus, r.r_minus, format_sci(r.p_value))
}

impl SummaryTable {
    /// Rows of text: header, one per problem, the mark footer and the
    /// signed-rank line.
    pub fn grid(&self, bold_best: bool) -> Vec<Vec<String>> {
        let mut out = Vec::with_capacity(self.problems.len() + 3);
        out.push(
            std::iter::once("Problem".to_owned())
                .chain(self.algorithms.iter().cloned())
                .collect(),
        );
        for (p, row) in self.problems.iter().zip(&self.cells) {
            let mut line = vec![p.clone()];
            for cell in row {
                line.push(match cell {
                    None => MISSING.to_owned(),
                    Some(c) if bold_best && c.best => format!("**{}**", c.text()),
                    Some(c) => c.text(),
                });
            }
            out.push(line);
        }
        let mut footer = vec!["+/-/=".to_owned()];
        footer.extend(self.counts.iter().map(|c| c.map(|c| c.text()).unwrap_or_default()));
        out.push(footer);
        let mut signed = vec!["R+/R-/p".to_owned()];
        signed.extend(self.signed_rank.iter().enumerate().map(|(j, r)| match r {
            Some(r) => signed_rank_text(r),
            None if j + 1 == self.algorithms.len() => String::new(),
            None => MISSING.to_owned(),
        }));
        out.push(signed);
        out
    }

    pub fn to_markdown(&self) -> String {
        let grid = self.grid(true);
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} (mean (std)); rank-sum marks against {} at alpha = {}",
            self.metric, self.base, self.alpha
        );
        let _ = writeln!(s);
        for (i, row) in grid.iter().enumerate() {
            let _ = writeln!(s, "| {} |", row.join(" | "));
            if i == 0 {
                let _ = writeln!(s, "|{}", "---|".repeat(row.len()));
            }
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
        for row in self.grid(false) {
            w.write_record(&row).map_err(|e| HarnessError::csv(path, e))?;
        }
        w.flush().map_err(|e| HarnessError::io(path, e))
    }

    /// Writes `summary_<metric>.md` and `.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        let stem = format!("summary_{}", self.metric.name());
        let md = dir.join(format!("{stem}.md"));
        let csv_path = dir.join(format!("{stem}.csv"));
        fs::write(&md, self.to_markdown()).map_err(|e| HarnessError::io(&md, e))?;
        self.write_csv(&csv_path)?;
        Ok((md, csv_path))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub metric: String,
    pub algorithm: String,
    pub mean_rank: f64,
    pub chi_square: f64,
    pub n_problems: usize,
}

pub const RANKS_FILE: &str = "ranks.csv";
const RANK_HEADER: [&str; 5] = ["metric", "algorithm", "mean_rank", "chi_square", "n_problems"];

/// Friedman mean ranks per metric over the problems every algorithm has
/// results for.
pub fn rank_report(results: &Results, metrics: &[Indicator], aggregate: Aggregate) -> Result<Vec<RankRow>> {
    let algorithms = results.algorithms();
    let problems = results.problems();
    let mut out = Vec::new();
    for &metric in metrics {
        let samples = results.samples(metric);
        let matrix: Vec<Vec<f64>> = problems
            .iter()
            .filter_map(|p| {
                algorithms
                    .iter()
                    .map(|a| {
                        samples
                            .get(&(p.clone(), a.clone()))
                            .filter(|v| !v.is_empty())
                            .map(|v| aggregate.apply(v))
                    })
                    .collect::<Option<Vec<f64>>>()
            })
            .collect();
        let f = friedman_ranks(&matrix, orientation(metric)).map_err(|e| {
            HarnessError::Report(format!("{metric}: {e} ({} complete problems)", matrix.len()))
        })?;
        for (a, r) in algorithms.iter().zip(&f.mean_ranks) {
            out.push(RankRow {
                metric: metric.name().to_owned(),
                algorithm: a.clone(),
                mean_rank: *r,
                chi_square: f.chi_square,
                n_problems: f.n_problems,
            });
        }
    }
    Ok(out)
}

pub fn write_ranks(dir: &Path, rows: &[RankRow]) -> Result<PathBuf> {
    let path = dir.join(RANKS_FILE);
    write_rows(&path, rows, &RANK_HEADER)?;
    Ok(path)
}

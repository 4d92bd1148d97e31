//! Benchmark protocol: every algorithm gets the same wall-clock budget on
//! every graph of a suite, only the best partitioning of each run is kept,
//! and per-algorithm means are reported with 99% confidence intervals.

use std::fmt::Write as _;
use std::io::Write;
use std::time::Duration;

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::algo::AlgoSpec;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::gen::GenSpec;
use crate::graph::Graph;
use crate::partition::Objective;
use crate::rng::derive_seed;

pub const DEFAULT_LEVEL: f64 = 0.99;
/// Sample size from which the Normal quantile replaces Student's t.
pub const NORMAL_FROM: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CiMethod {
    Normal,
    StudentT,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiSummary {
    pub mean: f64,
    pub sd: f64,
    pub lo: f64,
    pub hi: f64,
    pub n_samples: usize,
    pub level: f64,
    pub method: CiMethod,
}

impl CiSummary {
    pub fn half_width(&self) -> f64 {
        (self.hi - self.lo) / 2.0
    }

    pub fn overlaps(&self, other: &CiSummary) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Two-sided critical value for `level` with `n` samples.
pub fn critical_value(n: usize, level: f64) -> Result<f64> {
    let p = 1.0 - (1.0 - level) / 2.0;
    if n >= NORMAL_FROM {
        let d = Normal::new(0.0, 1.0).map_err(|e| Error::Degenerate(e.to_string()))?;
        Ok(d.inverse_cdf(p))
    } else {
        let d = StudentsT::new(0.0, 1.0, (n - 1) as f64)
            .map_err(|e| Error::Degenerate(e.to_string()))?;
        Ok(d.inverse_cdf(p))
    }
}

/// `mean ± q * sd / sqrt(n)` with the sample standard deviation and the
/// Normal quantile for `n >= 30`, Student's t with `n - 1` degrees of
/// freedom below that.
pub fn confidence_interval(samples: &[f64], level: f64) -> Result<CiSummary> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::Degenerate(format!(
            "confidence interval needs at least 2 samples, got {n}"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Infeasible(format!(
            "confidence level {level} outside (0, 1)"
        )));
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (nf - 1.0);
    let sd = var.sqrt();
    let q = critical_value(n, level)?;
    let h = q * sd / nf.sqrt();
    Ok(CiSummary {
        mean,
        sd,
        lo: mean - h,
        hi: mean + h,
        n_samples: n,
        level,
        method: if n >= NORMAL_FROM {
            CiMethod::Normal
        } else {
            CiMethod::StudentT
        },
    })
}

/// Best result of one algorithm run on one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    /// Position of the graph in the suite.
    pub graph: usize,
    pub trial: usize,
    pub seed: u64,
    pub algo: String,
    pub objective: Objective,
    pub best_score: f64,
    pub best_cuts: usize,
    pub edges: usize,
    pub wall_time: f64,
    pub starts: usize,
    pub extra: Vec<(&'static str, f64)>,
}

impl TrialResult {
    pub fn stat(&self, key: &str) -> Option<f64> {
        self.extra.iter().find(|(k, _)| *k == key).map(|&(_, v)| v)
    }

    /// Cut edges as a percentage of all edges.
    pub fn cut_percentage(&self) -> f64 {
        if self.edges == 0 {
            0.0
        } else {
            100.0 * self.best_cuts as f64 / self.edges as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub graph: usize,
    pub algo: String,
    pub message: String,
}

/// Per-algorithm aggregate over graphs (best over trials per graph).
#[derive(Debug, Clone, PartialEq)]
pub struct AlgoSummary {
    pub algo: String,
    pub graphs: usize,
    pub mean_cuts: f64,
    pub mean_score: f64,
    pub mean_cut_percentage: f64,
    /// `None` when fewer than two graphs succeeded.
    pub cuts_ci: Option<CiSummary>,
    pub score_ci: Option<CiSummary>,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub objective: Objective,
    pub budget: Budget,
    pub trials_per_graph: usize,
    pub seed: u64,
    /// Worker threads; each trial still runs single-threaded.
    pub jobs: usize,
    pub level: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            objective: Objective::MaxCut,
            budget: Budget::seconds(1.0),
            trials_per_graph: 1,
            seed: 0,
            jobs: 1,
            level: DEFAULT_LEVEL,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub suite: Vec<GenSpec>,
    pub config: BenchConfig,
    pub results: Vec<TrialResult>,
    pub failures: Vec<Failure>,
    pub summaries: Vec<AlgoSummary>,
}

/// FNV-1a, used to give every algorithm name its own seed stream.
fn name_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Seed of trial `trial` of `algo` on graph `graph`.
pub fn trial_seed(master: u64, graph: usize, algo: &str, trial: usize) -> u64 {
    derive_seed(
        derive_seed(master, graph as u64, name_hash(algo)),
        crate::rng::tag::TRIAL,
        trial as u64,
    )
}

fn run_trial(
    g: &Graph,
    graph: usize,
    algo: &AlgoSpec,
    trial: usize,
    cfg: &BenchConfig,
) -> std::result::Result<TrialResult, Failure> {
    let name = algo.to_string();
    let seed = trial_seed(cfg.seed, graph, &name, trial);
    match algo.run(g, cfg.objective, cfg.budget, seed) {
        Ok(r) => Ok(TrialResult {
            graph,
            trial,
            seed,
            algo: name,
            objective: cfg.objective,
            best_score: r.best.score(cfg.objective),
            best_cuts: r.best.cut(),
            edges: g.m(),
            wall_time: r.elapsed.as_secs_f64(),
            starts: r.starts,
            extra: r.extra,
        }),
        Err(e) => Err(Failure {
            graph,
            algo: name,
            message: e.to_string(),
        }),
    }
}

/// Runs every algorithm on every suite graph. Graphs are generated from
/// their specs as given; trial seeds are derived from `cfg.seed`, the graph
/// position, the algorithm name and the trial number. Failed runs are
/// recorded and left out of the summaries.
pub fn run_benchmark(
    suite: &[GenSpec],
    algos: &[AlgoSpec],
    cfg: &BenchConfig,
) -> Result<BenchReport> {
    if algos.is_empty() {
        return Err(Error::Infeasible("no algorithms to benchmark".into()));
    }
    if cfg.trials_per_graph == 0 {
        return Err(Error::Infeasible(
            "trials per graph must be at least 1".into(),
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| Error::Infeasible(format!("thread pool: {e}")))?;
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for (gi, spec) in suite.iter().enumerate() {
        let g = match spec.generate() {
            Ok(g) => g,
            Err(e) => {
                for a in algos {
                    failures.push(Failure {
                        graph: gi,
                        algo: a.to_string(),
                        message: format!("generating {spec}: {e}"),
                    });
                }
                continue;
            }
        };
        let work: Vec<(usize, usize)> = (0..algos.len())
            .flat_map(|ai| (0..cfg.trials_per_graph).map(move |t| (ai, t)))
            .collect();
        let outcomes: Vec<_> = pool.install(|| {
            work.par_iter()
                .map(|&(ai, t)| run_trial(&g, gi, &algos[ai], t, cfg))
                .collect()
        });
        for o in outcomes {
            match o {
                Ok(r) => results.push(r),
                Err(f) => failures.push(f),
            }
        }
    }
    let summaries = algos
        .iter()
        .map(|a| summarize(&a.to_string(), &results, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchReport {
        suite: suite.to_vec(),
        config: cfg.clone(),
        results,
        failures,
        summaries,
    })
}

/// Best trial per graph for `algo`, in graph order.
pub fn best_per_graph<'a>(
    results: &'a [TrialResult],
    algo: &str,
    objective: Objective,
) -> Vec<&'a TrialResult> {
    let mut best: Vec<&TrialResult> = Vec::new();
    for r in results.iter().filter(|r| r.algo == algo) {
        match best.iter_mut().find(|b| b.graph == r.graph) {
            Some(b) => {
                let better = match objective {
                    Objective::MaxCut => r.best_score > b.best_score,
                    Objective::MinQuotientCut => r.best_score < b.best_score,
                };
                if better {
                    *b = r;
                }
            }
            None => best.push(r),
        }
    }
    best.sort_by_key(|r| r.graph);
    best
}

fn summarize(algo: &str, results: &[TrialResult], cfg: &BenchConfig) -> Result<AlgoSummary> {
    let best = best_per_graph(results, algo, cfg.objective);
    let cuts: Vec<f64> = best.iter().map(|r| r.best_cuts as f64).collect();
    let scores: Vec<f64> = best.iter().map(|r| r.best_score).collect();
    let mean = |xs: &[f64]| {
        if xs.is_empty() {
            f64::NAN
        } else {
            xs.iter().sum::<f64>() / xs.len() as f64
        }
    };
    let pct: Vec<f64> = best.iter().map(|r| r.cut_percentage()).collect();
    let ci = |xs: &[f64]| -> Result<Option<CiSummary>> {
        if xs.len() < 2 {
            Ok(None)
        } else {
            confidence_interval(xs, cfg.level).map(Some)
        }
    };
    Ok(AlgoSummary {
        algo: algo.to_string(),
        graphs: best.len(),
        mean_cuts: mean(&cuts),
        mean_score: mean(&scores),
        mean_cut_percentage: mean(&pct),
        cuts_ci: ci(&cuts)?,
        score_ci: ci(&scores)?,
    })
}

/// Human-readable summary table. Graphs with fewer than two successful
/// runs show `n<2` instead of an interval.
pub fn render_table(report: &BenchReport) -> String {
    let cfg = &report.config;
    let mut s = String::new();
    let budget = match (cfg.budget.time, cfg.budget.restarts) {
        (Some(t), Some(r)) => format!("{:.3}s or {r} starts", t.as_secs_f64()),
        (Some(t), None) => format!("{:.3}s", t.as_secs_f64()),
        (None, Some(r)) => format!("{r} starts"),
        (None, None) => "1 start".to_string(),
    };
    let _ = writeln!(
        s,
        "objective {}  graphs {}  budget {}  trials {}  level {}",
        cfg.objective,
        report.suite.len(),
        budget,
        cfg.trials_per_graph,
        cfg.level
    );
    let _ = writeln!(
        s,
        "{:<12} {:>6} {:>14} {:>14} {:>9} {:>30}",
        "algo", "graphs", "mean cuts", "mean score", "cut %", "99% CI of cuts"
    );
    for a in &report.summaries {
        let ci = match &a.cuts_ci {
            Some(c) => format!("[{:.4}, {:.4}]", c.lo, c.hi),
            None => "n<2".to_string(),
        };
        let _ = writeln!(
            s,
            "{:<12} {:>6} {:>14.4} {:>14.6} {:>9.4} {:>30}",
            a.algo, a.graphs, a.mean_cuts, a.mean_score, a.mean_cut_percentage, ci
        );
    }
    for f in &report.failures {
        let _ = writeln!(
            s,
            "failed: graph {} algo {}: {}",
            f.graph, f.algo, f.message
        );
    }
    s
}

pub const CSV_HEADER: &str = "algo,graph,seed,objective,score,cuts,time_s";
pub const PLOT_HEADER: &str = "algo,lo,mean,hi";

pub fn write_csv<W: Write>(mut w: W, results: &[TrialResult]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in results {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.algo, r.graph, r.seed, r.objective, r.best_score, r.best_cuts, r.wall_time
        )?;
    }
    Ok(())
}

/// Interval rows for plotting; algorithms without an interval are skipped.
pub fn write_plot_data<W: Write>(mut w: W, summaries: &[AlgoSummary]) -> Result<()> {
    writeln!(w, "{PLOT_HEADER}")?;
    for a in summaries {
        if let Some(c) = &a.cuts_ci {
            writeln!(w, "{},{},{},{}", a.algo, c.lo, c.mean, c.hi)?;
        }
    }
    Ok(())
}

/// A row of plot data.
#[derive(Debug, Clone, PartialEq)]
pub struct CiRow {
    pub algo: String,
    pub lo: f64,
    pub mean: f64,
    pub hi: f64,
}

pub fn parse_plot_data(text: &str) -> Result<Vec<CiRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == PLOT_HEADER {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(Error::parse(i + 1, "expected algo,lo,mean,hi"));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::parse(i + 1, format!("bad number {s:?}")))
        };
        rows.push(CiRow {
            algo: f[0].to_string(),
            lo: num(f[1])?,
            mean: num(f[2])?,
            hi: num(f[3])?,
        });
    }
    Ok(rows)
}

/// Files written by [`emit_table`].
pub const TABLE_FILE: &str = "summary.txt";
pub const CSV_FILE: &str = "results.csv";
pub const PLOT_FILE: &str = "intervals.csv";

/// Writes the table, the per-run CSV and the interval plot data into `dir`
/// and returns the table text.
pub fn emit_table(report: &BenchReport, dir: &std::path::Path) -> Result<String> {
    if report.summaries.is_empty() {
        return Err(Error::Infeasible("no algorithms in report".into()));
    }
    std::fs::create_dir_all(dir)?;
    let table = render_table(report);
    std::fs::write(dir.join(TABLE_FILE), &table)?;
    write_csv(std::fs::File::create(dir.join(CSV_FILE))?, &report.results)?;
    write_plot_data(
        std::fs::File::create(dir.join(PLOT_FILE))?,
        &report.summaries,
    )?;
    Ok(table)
}

/// Mean of the `key` statistic over the runs of `algo`.
pub fn mean_stat(results: &[TrialResult], algo: &str, key: &str) -> Option<f64> {
    let xs: Vec<f64> = results
        .iter()
        .filter(|r| r.algo == algo)
        .filter_map(|r| r.stat(key))
        .collect();
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Total loop time over all runs.
pub fn total_time(results: &[TrialResult]) -> Duration {
    Duration::from_secs_f64(results.iter().map(|r| r.wall_time).sum())
}

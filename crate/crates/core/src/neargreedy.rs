//! Near-greedy analysis.
//!
//! Any partitioning can be rebuilt by a constructive algorithm that places
//! vertices one at a time onto their final sides. Each placement is either
//! greedy (the target side gains at least as much as the other side would)
//! or non-greedy. Over an ensemble of graphs, the fraction of graphs whose
//! `i`-th placement was non-greedy estimates the ng-function `F(i)`, which is
//! well approximated by `a + b / sqrt(i)`. The probabilistic greedy heuristic
//! (PG) builds partitionings that take non-greedy steps with probability
//! `F(i)`.

use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::Rng as _;
use rayon::prelude::*;

use crate::algo::AlgoSpec;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::gen::GenSpec;
use crate::graph::Graph;
use crate::init::{construct, greedy_side, DiffMode, TieBreak};
use crate::partition::{Objective, Partitioning, Side};
use crate::rng::{derive_seed, derived_rng, rng_from_seed, tag, Rng};

pub const PERCENTILE_BINS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Greedy,
    NonGreedy,
}

/// How the replay picks the next vertex to place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ordering {
    Random,
    MaxDiffMaxDegree,
}

impl FromStr for Ordering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Ordering::Random),
            "maxdiff" | "max-diff" | "maxdiff-maxdegree" => Ok(Ordering::MaxDiffMaxDegree),
            _ => Err(Error::parse(0, format!("unknown ordering {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementTrace {
    pub order: Vec<usize>,
    pub labels: Vec<Label>,
    /// Average degree of the unplaced subgraph just before each placement.
    pub unplaced_avg_degree: Vec<f64>,
    pub target: Partitioning,
}

impl PlacementTrace {
    pub fn nongreedy_count(&self) -> usize {
        self.labels
            .iter()
            .filter(|&&l| l == Label::NonGreedy)
            .count()
    }

    pub fn nongreedy_fraction(&self) -> f64 {
        if self.labels.is_empty() {
            0.0
        } else {
            self.nongreedy_count() as f64 / self.labels.len() as f64
        }
    }
}

/// Rebuilds `target` placement by placement and labels every step.
///
/// A placement is greedy when the target side adds at least as many cut
/// edges as the other side would (max-cut) or at most as many (min-quotient).
/// Ties count as greedy.
pub fn replay_label(
    g: &Graph,
    target: &Partitioning,
    ordering: Ordering,
    objective: Objective,
    rng: &mut Rng,
) -> Result<PlacementTrace> {
    if target.len() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            got: target.len(),
        });
    }
    let (order, rest) = match ordering {
        Ordering::Random => random_order_replay(g, target, objective, rng),
        Ordering::MaxDiffMaxDegree => {
            let (_, steps) = construct(
                g,
                DiffMode::MaxDiff,
                TieBreak::MaxDegreeThenRandom,
                rng,
                |c, _| target.side(c.vertex),
            );
            let order = steps.iter().map(|(c, _)| c.vertex).collect();
            let rest = steps
                .iter()
                .map(|(c, s)| (label_of(c.is_greedy(objective, *s)), c.unplaced_avg_degree))
                .collect();
            (order, rest)
        }
    };
    let (labels, unplaced_avg_degree) = rest.into_iter().unzip();
    Ok(PlacementTrace {
        order,
        labels,
        unplaced_avg_degree,
        target: target.clone(),
    })
}

fn label_of(greedy: bool) -> Label {
    if greedy {
        Label::Greedy
    } else {
        Label::NonGreedy
    }
}

fn random_order_replay(
    g: &Graph,
    target: &Partitioning,
    objective: Objective,
    rng: &mut Rng,
) -> (Vec<usize>, Vec<(Label, f64)>) {
    use rand::seq::SliceRandom;
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut placed = vec![false; n];
    let mut unplaced_edges = g.m();
    let mut out = Vec::with_capacity(n);
    for (i, &v) in order.iter().enumerate() {
        let remaining = n - i;
        let avg = 2.0 * unplaced_edges as f64 / remaining as f64;
        let mut on = [0usize; 2];
        for &w in g.neighbors(v) {
            if placed[w] {
                on[target.side(w).index()] += 1;
            } else {
                unplaced_edges -= 1;
            }
        }
        placed[v] = true;
        let s = target.side(v);
        // edges cut by placing v on side s are its placed neighbors on the other side
        let (here, there) = (on[s.other().index()], on[s.index()]);
        let greedy = match objective {
            Objective::MaxCut => here >= there,
            Objective::MinQuotientCut => here <= there,
        };
        out.push((label_of(greedy), avg));
    }
    (order, out)
}

/// Least-squares fit of `F(i) = a + b / sqrt(i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgFit {
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
    pub stderr: f64,
}

impl NgFit {
    pub fn eval(&self, i: usize) -> f64 {
        self.a + self.b / (i.max(1) as f64).sqrt()
    }
}

/// Ordinary least squares of `raw[i-1]` on `1/sqrt(i)` for `i = 1..=n`.
///
/// Constant data gives `b = 0` and `R² = 1`. The residual standard error
/// uses `n - 2` degrees of freedom and is 0 when only two points exist.
pub fn fit_ng(raw: &[f64]) -> Result<NgFit> {
    let n = raw.len();
    if n < 2 {
        return Err(Error::Degenerate(
            "regression needs at least two points".into(),
        ));
    }
    let xs: Vec<f64> = (1..=n).map(|i| 1.0 / (i as f64).sqrt()).collect();
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = raw.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(raw) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 {
        return Err(Error::Degenerate("all regressors equal".into()));
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let sse: f64 = xs
        .iter()
        .zip(raw)
        .map(|(x, y)| {
            let r = y - (a + b * x);
            r * r
        })
        .sum();
    let r_squared = if syy <= f64::EPSILON * nf {
        1.0
    } else {
        1.0 - sse / syy
    };
    let stderr = if n > 2 {
        (sse / (nf - 2.0)).sqrt()
    } else {
        0.0
    };
    Ok(NgFit {
        a,
        b,
        r_squared,
        stderr,
    })
}

/// Means of `raw` over 100 equal-width bins of `i / n`. A bin that no index
/// falls into (only when `n < 100`) repeats the previous bin's value.
pub fn percentile_bins(raw: &[f64]) -> Vec<f64> {
    let n = raw.len();
    let mut sum = vec![0.0; PERCENTILE_BINS];
    let mut count = vec![0usize; PERCENTILE_BINS];
    for (i, &y) in raw.iter().enumerate() {
        let bin = i * PERCENTILE_BINS / n;
        sum[bin] += y;
        count[bin] += 1;
    }
    let mut out = Vec::with_capacity(PERCENTILE_BINS);
    let mut last = 0.0;
    for (s, c) in sum.into_iter().zip(count) {
        if c > 0 {
            last = s / c as f64;
        }
        out.push(last);
    }
    out
}

/// The bin `percentile_bins` puts 0-based index `i` of `n` into.
pub fn percentile_of(i: usize, n: usize) -> usize {
    i * PERCENTILE_BINS / n.max(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NgProfile {
    /// Mean non-greedy probability per percentile bin.
    pub probs: Vec<f64>,
    /// Per-index fraction of graphs whose placement was non-greedy.
    pub raw: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
    pub stderr: f64,
    pub ensemble_size: usize,
    /// Per-index mean of the unplaced-subgraph average degree.
    pub unplaced_avg_degree: Vec<f64>,
    /// Share of all non-greedy placements in the first half of the order.
    pub first_half_share: f64,
}

impl NgProfile {
    /// Builds a profile from per-index non-greedy counts.
    pub fn from_counts(
        counts: &[usize],
        ensemble_size: usize,
        avg_degree: Vec<f64>,
    ) -> Result<Self> {
        if ensemble_size == 0 {
            return Err(Error::Infeasible("ensemble size must be at least 1".into()));
        }
        let raw: Vec<f64> = counts
            .iter()
            .map(|&k| k as f64 / ensemble_size as f64)
            .collect();
        Self::from_raw(raw, ensemble_size, avg_degree, counts)
    }

    fn from_raw(
        raw: Vec<f64>,
        ensemble_size: usize,
        avg_degree: Vec<f64>,
        counts: &[usize],
    ) -> Result<Self> {
        let n = raw.len();
        let fit = if n >= 2 {
            fit_ng(&raw)?
        } else {
            NgFit {
                a: raw.first().copied().unwrap_or(0.0),
                b: 0.0,
                r_squared: 1.0,
                stderr: 0.0,
            }
        };
        let total: usize = counts.iter().sum();
        let first: usize = counts[..n / 2].iter().sum();
        Ok(NgProfile {
            probs: if n == 0 {
                vec![0.0; PERCENTILE_BINS]
            } else {
                percentile_bins(&raw)
            },
            a: fit.a,
            b: fit.b,
            r_squared: fit.r_squared,
            stderr: fit.stderr,
            ensemble_size,
            unplaced_avg_degree: avg_degree,
            first_half_share: if total == 0 {
                0.0
            } else {
                first as f64 / total as f64
            },
            raw,
        })
    }

    /// Mean of `raw`: the overall non-greedy placement fraction.
    pub fn nongreedy_fraction(&self) -> f64 {
        if self.raw.is_empty() {
            0.0
        } else {
            self.raw.iter().sum::<f64>() / self.raw.len() as f64
        }
    }

    pub fn fit(&self) -> NgFit {
        NgFit {
            a: self.a,
            b: self.b,
            r_squared: self.r_squared,
            stderr: self.stderr,
        }
    }

    /// Writes the profile file: a header comment, the `a b r2 stderr n`
    /// values line (`n` is the ensemble size), then one raw value per line.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", crate::format::FORMAT_LINE)?;
        writeln!(w, "# a b r2 stderr n")?;
        writeln!(
            w,
            "{} {} {} {} {}",
            self.a, self.b, self.r_squared, self.stderr, self.ensemble_size
        )?;
        for y in &self.raw {
            writeln!(w, "{y}")?;
        }
        Ok(())
    }

    /// Reads a profile file. The stored coefficients are kept as written;
    /// percentile bins are recomputed from the raw values.
    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut header: Option<[f64; 4]> = None;
        let mut ensemble_size = 0;
        let mut raw = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            if header.is_none() {
                let f: Vec<&str> = t.split_whitespace().collect();
                if f.len() != 5 {
                    return Err(Error::parse(lineno, "expected `a b r2 stderr n`"));
                }
                let mut vals = [0.0; 4];
                for (slot, s) in vals.iter_mut().zip(&f) {
                    *slot = s
                        .parse()
                        .map_err(|_| Error::parse(lineno, format!("bad number {s:?}")))?;
                }
                ensemble_size = f[4]
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad ensemble size {:?}", f[4])))?;
                header = Some(vals);
            } else {
                let y: f64 = t
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad value {t:?}")))?;
                if !(0.0..=1.0).contains(&y) {
                    return Err(Error::parse(
                        lineno,
                        format!("probability {y} outside [0, 1]"),
                    ));
                }
                raw.push(y);
            }
        }
        let [a, b, r_squared, stderr] =
            header.ok_or_else(|| Error::parse(0, "missing coefficient line"))?;
        Ok(NgProfile {
            probs: if raw.is_empty() {
                vec![0.0; PERCENTILE_BINS]
            } else {
                percentile_bins(&raw)
            },
            a,
            b,
            r_squared,
            stderr,
            ensemble_size,
            unplaced_avg_degree: Vec::new(),
            first_half_share: 0.0,
            raw,
        })
    }

    /// CSV with columns `index,raw,percentile,fitted`; `index` is 1-based.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,raw,percentile,fitted")?;
        let n = self.raw.len();
        let fit = self.fit();
        for (i, y) in self.raw.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{}",
                i + 1,
                y,
                percentile_of(i, n),
                fit.eval(i + 1)
            )?;
        }
        Ok(())
    }
}

/// Per-step probability of a non-greedy placement used by PG.
#[derive(Debug, Clone, PartialEq)]
pub enum NgFunction {
    /// `a + b / sqrt(i)`, clamped to `[0, 1]`.
    Fitted {
        a: f64,
        b: f64,
    },
    /// Per-index table; steps past its end use the last entry.
    Empirical(Vec<f64>),
    Constant(f64),
}

impl NgFunction {
    /// Fitted curve for sparse random graphs of a few hundred vertices,
    /// used when PG runs without a measured profile.
    pub const DEFAULT_FIT: NgFunction = NgFunction::Fitted {
        a: -0.0292,
        b: 0.3991,
    };

    /// Probability for 1-based step `i`.
    pub fn prob(&self, i: usize) -> f64 {
        let p = match self {
            NgFunction::Fitted { a, b } => a + b / (i.max(1) as f64).sqrt(),
            NgFunction::Empirical(t) => match t.len() {
                0 => 0.0,
                len => t[(i.max(1) - 1).min(len - 1)],
            },
            NgFunction::Constant(c) => *c,
        };
        p.clamp(0.0, 1.0)
    }

    pub fn fitted(profile: &NgProfile) -> Self {
        NgFunction::Fitted {
            a: profile.a,
            b: profile.b,
        }
    }

    pub fn empirical(profile: &NgProfile) -> Self {
        NgFunction::Empirical(profile.raw.clone())
    }
}

/// One probabilistic greedy construction: max-diff selection with
/// max-degree tie-break; at step `i` the vertex goes to its locally worse
/// side with probability `F(i)` (random side on a tie) and to its better
/// side otherwise. No random draw is spent on steps where `F(i)` is 0 or 1.
pub fn pg_construct(g: &Graph, objective: Objective, ng: &NgFunction, seed: u64) -> Partitioning {
    let mut rng = rng_from_seed(seed);
    pg_construct_with(g, objective, ng, &mut rng)
}

fn pg_construct_with(
    g: &Graph,
    objective: Objective,
    ng: &NgFunction,
    rng: &mut Rng,
) -> Partitioning {
    construct(
        g,
        DiffMode::MaxDiff,
        TieBreak::MaxDegreeThenRandom,
        rng,
        |c, rng| {
            let f = ng.prob(c.step);
            let nongreedy = if f <= 0.0 {
                false
            } else if f >= 1.0 {
                true
            } else {
                rng.gen::<f64>() < f
            };
            if nongreedy {
                match c.better_side(objective) {
                    Some(s) => s.other(),
                    None => Side::from_bit(rng.gen()),
                }
            } else {
                greedy_side(c, objective, rng)
            }
        },
    )
    .0
}

#[derive(Debug, Clone)]
pub struct PgOutcome {
    pub best: Partitioning,
    pub starts: usize,
}

/// Repeats [`pg_construct`] with seeds `derive_seed(seed, RESTART, i)`
/// until the budget runs out and keeps the best result.
pub fn pg_run(
    g: &Graph,
    objective: Objective,
    ng: &NgFunction,
    budget: Budget,
    seed: u64,
) -> PgOutcome {
    let clock = budget.start();
    let mut best: Option<Partitioning> = None;
    let mut starts = 0;
    while clock.may_start(starts) || best.is_none() {
        let p = pg_construct(
            g,
            objective,
            ng,
            derive_seed(seed, tag::RESTART, starts as u64),
        );
        starts += 1;
        if best
            .as_ref()
            .is_none_or(|b| objective.better(p.quality(), b.quality()))
        {
            best = Some(p);
        }
    }
    PgOutcome {
        best: best.expect("at least one start"),
        starts,
    }
}

/// Ensemble estimation settings.
#[derive(Debug, Clone)]
pub struct NgConfig {
    pub objective: Objective,
    /// Optimizer producing the target partitionings.
    pub oracle: AlgoSpec,
    /// Budget for each oracle run.
    pub oracle_budget: Budget,
    pub ordering: Ordering,
    pub ensemble_size: usize,
    pub seed: u64,
    /// Worker threads; 0 means the rayon default.
    pub jobs: usize,
}

/// Per-graph result of an ensemble member.
struct Member {
    nongreedy: Vec<bool>,
    avg_degree: Vec<f64>,
}

fn run_member(spec: &GenSpec, cfg: &NgConfig, idx: usize) -> Result<Member> {
    let g = (*spec)
        .with_seed(derive_seed(cfg.seed, tag::ENSEMBLE_GRAPH, idx as u64))
        .generate()?;
    let target = cfg
        .oracle
        .run(
            &g,
            cfg.objective,
            cfg.oracle_budget,
            derive_seed(cfg.seed, tag::ENSEMBLE_ORACLE, idx as u64),
        )?
        .best;
    let mut rng = derived_rng(cfg.seed, tag::ENSEMBLE_REPLAY, idx as u64);
    let trace = replay_label(&g, &target, cfg.ordering, cfg.objective, &mut rng)?;
    Ok(Member {
        nongreedy: trace
            .labels
            .iter()
            .map(|&l| l == Label::NonGreedy)
            .collect(),
        avg_degree: trace.unplaced_avg_degree,
    })
}

/// Estimates the ng-function of the graph class `spec` (its seed is
/// ignored; member `j` uses a seed derived from `cfg.seed` and `j`).
/// Members run in parallel; aggregation is by member index, so the result
/// does not depend on the thread count.
pub fn estimate_ng(spec: &GenSpec, cfg: &NgConfig) -> Result<NgProfile> {
    if cfg.ensemble_size == 0 {
        return Err(Error::Infeasible("ensemble size must be at least 1".into()));
    }
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Infeasible(format!("thread pool: {e}")))?;
    let members: Vec<Result<Member>> = pool.install(|| {
        (0..cfg.ensemble_size)
            .into_par_iter()
            .map(|j| run_member(spec, cfg, j))
            .collect()
    });
    let n = spec.n;
    let mut counts = vec![0usize; n];
    let mut degree = vec![0.0; n];
    for m in members {
        let m = m?;
        for i in 0..n {
            counts[i] += m.nongreedy[i] as usize;
            degree[i] += m.avg_degree[i];
        }
    }
    for d in &mut degree {
        *d /= cfg.ensemble_size as f64;
    }
    NgProfile::from_counts(&counts, cfg.ensemble_size, degree)
}

/// Indices (0-based) of local maxima of `raw` in the late part of the order
/// where the mean unplaced average degree lies in `[lo, hi]`.
pub fn spike_indices(profile: &NgProfile, lo: f64, hi: f64) -> Vec<usize> {
    let raw = &profile.raw;
    (1..raw.len().saturating_sub(1))
        .filter(|&i| raw[i] > raw[i - 1] && raw[i] >= raw[i + 1])
        .filter(|&i| {
            let d = profile
                .unplaced_avg_degree
                .get(i)
                .copied()
                .unwrap_or(f64::NAN);
            (lo..=hi).contains(&d)
        })
        .collect()
}

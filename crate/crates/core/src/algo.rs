//! Uniform entry point for every optimizer.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::anneal::{sa_run, SaConfig};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::fm::fm_optimize;
use crate::graph::Graph;
use crate::init::{construct_w, InitMethod};
use crate::neargreedy::{pg_run, NgFunction};
use crate::partition::{Objective, Partitioning};
use crate::po::{po_optimize, PoConfig};
use crate::rng::{derived_rng, tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgoKind {
    Po,
    Kl,
    Sa,
    Pg,
    W,
}

impl AlgoKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgoKind::Po => "po",
            AlgoKind::Kl => "kl",
            AlgoKind::Sa => "sa",
            AlgoKind::Pg => "pg",
            AlgoKind::W => "w",
        }
    }
}

impl FromStr for AlgoKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "po" => Ok(AlgoKind::Po),
            "kl" | "fm" => Ok(AlgoKind::Kl),
            "sa" => Ok(AlgoKind::Sa),
            "pg" => Ok(AlgoKind::Pg),
            "w" => Ok(AlgoKind::W),
            _ => Err(Error::parse(0, format!("unknown algorithm {s:?}"))),
        }
    }
}

/// An optimizer with its settings.
///
/// The textual form is the algorithm name with an optional initial
/// partitioning prefix: `po`, `kl`, `line-kl`, `random-po`, `w-sa`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgoSpec {
    pub kind: AlgoKind,
    /// `None` picks the default for the objective and graph.
    pub init: Option<InitMethod>,
    pub po: PoConfig,
    pub sa: SaConfig,
    /// `None`: long run for max-cut on graphs without coordinates.
    pub sa_long_run: Option<bool>,
    pub ng: NgFunction,
}

impl AlgoSpec {
    pub fn new(kind: AlgoKind) -> Self {
        AlgoSpec {
            kind,
            init: None,
            // restarts continue until the budget is spent, so every
            // algorithm uses the same time
            po: PoConfig {
                stale_restarts: None,
                ..PoConfig::default()
            },
            sa: SaConfig::default(),
            sa_long_run: None,
            ng: NgFunction::DEFAULT_FIT,
        }
    }

    pub fn with_init(mut self, init: InitMethod) -> Self {
        self.init = Some(init);
        self
    }

    /// Initial partitioning generator used for `g`. PO starts from W;
    /// KL and SA start from random partitionings except for min-quotient-cut
    /// on graphs with coordinates, where they start from the line heuristic.
    pub fn init_for(&self, g: &Graph, objective: Objective) -> InitMethod {
        self.init.unwrap_or(match self.kind {
            AlgoKind::Po | AlgoKind::W | AlgoKind::Pg => InitMethod::W,
            AlgoKind::Kl | AlgoKind::Sa => {
                if objective == Objective::MinQuotientCut && g.coords().is_some() {
                    InitMethod::Line
                } else {
                    InitMethod::Random
                }
            }
        })
    }

    pub fn long_run_for(&self, g: &Graph, objective: Objective) -> bool {
        self.sa_long_run
            .unwrap_or(objective == Objective::MaxCut && g.coords().is_none())
    }

    /// Runs the optimizer on `g` within `budget`.
    pub fn run(
        &self,
        g: &Graph,
        objective: Objective,
        budget: Budget,
        seed: u64,
    ) -> Result<RunResult> {
        let init = self.init_for(g, objective);
        let started = Instant::now();
        let p0 = || init.generate(g, objective, &mut derived_rng(seed, tag::INIT, 0));
        Ok(match self.kind {
            AlgoKind::Po => {
                let out = po_optimize(g, &p0()?, objective, &self.po, budget, seed)?;
                RunResult {
                    best: out.best,
                    starts: out.stats.starts,
                    elapsed: out.stats.elapsed,
                    extra: vec![
                        ("iterations", out.stats.iterations as f64),
                        ("accepted_paths", out.stats.accepted_paths as f64),
                        ("mean_path_length", out.stats.mean_path_length()),
                    ],
                }
            }
            AlgoKind::Kl => {
                let out = fm_optimize(g, &p0()?, objective, budget, seed, init)?;
                RunResult {
                    best: out.best,
                    starts: out.stats.starts,
                    elapsed: out.stats.elapsed,
                    extra: vec![("passes", out.stats.passes as f64)],
                }
            }
            AlgoKind::Sa => {
                let cfg = SaConfig {
                    long_run: self.long_run_for(g, objective),
                    ..self.sa
                };
                let out = sa_run(g, objective, &cfg, budget, seed, init)?;
                RunResult {
                    best: out.best,
                    starts: out.stats.starts,
                    elapsed: out.stats.elapsed,
                    extra: vec![
                        ("stages", out.stats.stages as f64),
                        ("initial_temperature", out.stats.initial_temperature),
                    ],
                }
            }
            AlgoKind::Pg => {
                let out = pg_run(g, objective, &self.ng, budget, seed);
                RunResult {
                    best: out.best,
                    starts: out.starts,
                    elapsed: started.elapsed(),
                    extra: Vec::new(),
                }
            }
            AlgoKind::W => {
                let clock = budget.start();
                let mut best: Option<Partitioning> = None;
                let mut starts = 0;
                while clock.may_start(starts) || best.is_none() {
                    let mut rng = derived_rng(seed, tag::RESTART, starts as u64);
                    let p = if self.init.is_some() {
                        init.generate(g, objective, &mut rng)?
                    } else {
                        construct_w(g, objective, &mut rng)
                    };
                    starts += 1;
                    if best
                        .as_ref()
                        .is_none_or(|b| objective.better(p.quality(), b.quality()))
                    {
                        best = Some(p);
                    }
                }
                RunResult {
                    best: best.expect("at least one start"),
                    starts,
                    elapsed: clock.elapsed(),
                    extra: Vec::new(),
                }
            }
        })
    }
}

impl RunResult {
    pub fn stat(&self, key: &str) -> Option<f64> {
        self.extra.iter().find(|(k, _)| *k == key).map(|&(_, v)| v)
    }
}

impl fmt::Display for AlgoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.init {
            Some(init) => write!(f, "{}-{}", init.name(), self.kind.name()),
            None => f.write_str(self.kind.name()),
        }
    }
}

impl FromStr for AlgoSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if let Ok(kind) = s.parse::<AlgoKind>() {
            return Ok(AlgoSpec::new(kind));
        }
        let (init, kind) = s
            .split_once('-')
            .ok_or_else(|| Error::parse(0, format!("unknown algorithm {s:?}")))?;
        let init: InitMethod = init.parse().map_err(|e: String| Error::parse(0, e))?;
        Ok(AlgoSpec::new(kind.parse()?).with_init(init))
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub best: Partitioning,
    pub starts: usize,
    /// Time spent in the optimization loop, excluding setup.
    pub elapsed: Duration,
    /// Algorithm-specific statistics.
    pub extra: Vec<(&'static str, f64)>,
}

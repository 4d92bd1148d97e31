//! Simulated annealing with single-vertex flips.
//!
//! Schedule follows the classic graph-partitioning annealer: a trial run
//! picks the starting temperature so a target fraction of uphill moves is
//! accepted, each temperature runs `temp_length_factor * n` proposals, the
//! temperature drops geometrically, and the run freezes after several
//! consecutive low-acceptance stages with no new incumbent. Min-quotient-cut
//! anneals on cut size plus a squared-imbalance penalty; the incumbent is
//! still chosen by the true quotient.

use std::time::Duration;

use rand::Rng as _;

use crate::budget::{Budget, Clock};
use crate::error::Result;
use crate::graph::{Graph, Vertex};
use crate::init::{init_random, InitMethod};
use crate::partition::{gain_unchecked, Objective, Partitioning, Quality, Side};
use crate::rng::{derived_rng, tag, Rng};

/// Proposals between budget checks.
const CLOCK_STRIDE: usize = 512;
/// Temperature at which a stretched long run is considered finished.
pub const T_FREEZE: f64 = 0.01;
/// An anneal also stops once the temperature falls this far below `T0`,
/// which matters on graphs where zero-cost moves keep acceptance high.
const T_FLOOR_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaConfig {
    pub cooling_ratio: f64,
    pub temp_length_factor: f64,
    pub init_accept_target: f64,
    pub freeze_stages: usize,
    /// Stage acceptance rate below which a stage counts toward freezing.
    pub freeze_accept: f64,
    pub balance_alpha: f64,
    /// Proposals in the trial run, as a multiple of `n`.
    pub trial_factor: f64,
    /// Spend the whole budget on one anneal with a stretched schedule.
    pub long_run: bool,
    /// Start the clock after the trial run.
    pub exclude_trial: bool,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            cooling_ratio: 0.95,
            temp_length_factor: 16.0,
            init_accept_target: 0.4,
            freeze_stages: 5,
            freeze_accept: 0.02,
            balance_alpha: 0.05,
            trial_factor: 10.0,
            long_run: false,
            exclude_trial: true,
        }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.cooling_ratio > 0.0
            && self.cooling_ratio < 1.0
            && self.temp_length_factor > 0.0
            && self.init_accept_target > 0.0
            && self.init_accept_target < 1.0
            && self.freeze_stages >= 1
            && self.balance_alpha >= 0.0
            && self.trial_factor > 0.0;
        if ok {
            Ok(())
        } else {
            Err(crate::Error::Infeasible(format!(
                "invalid annealing config {self:?}"
            )))
        }
    }
}

/// Annealing cost, lower is better: `-cut` for max-cut,
/// `cut + alpha * (|L| - |R|)^2 / n` for min-quotient-cut.
pub fn sa_cost(g: &Graph, p: &Partitioning, objective: Objective, alpha: f64) -> f64 {
    cost_of(p.quality(), objective, alpha, g.n())
}

fn cost_of(q: Quality, objective: Objective, alpha: f64, n: usize) -> f64 {
    match objective {
        Objective::MaxCut => -(q.cut as f64),
        Objective::MinQuotientCut => {
            let imbalance = q.left as f64 - q.right as f64;
            q.cut as f64 + alpha * imbalance * imbalance / n.max(1) as f64
        }
    }
}

/// `T0 = -mean_uphill / ln(target)`, so an average uphill move is accepted
/// with probability `target`.
pub fn initial_temperature(mean_uphill: f64, target: f64) -> f64 {
    -mean_uphill / target.ln()
}

/// Metropolis acceptance probability of a move with cost change `delta`.
pub fn acceptance_probability(delta: f64, temperature: f64) -> f64 {
    if delta <= 0.0 {
        1.0
    } else if temperature <= 0.0 {
        0.0
    } else {
        (-delta / temperature).exp()
    }
}

/// Partitioning plus cached gains, with exact single-flip cost deltas.
pub struct Annealer<'g> {
    g: &'g Graph,
    objective: Objective,
    alpha: f64,
    p: Partitioning,
    gains: Vec<i64>,
}

impl<'g> Annealer<'g> {
    pub fn new(g: &'g Graph, p: Partitioning, objective: Objective, alpha: f64) -> Self {
        let gains = (0..g.n()).map(|v| gain_unchecked(g, &p, v)).collect();
        Annealer {
            g,
            objective,
            alpha,
            p,
            gains,
        }
    }

    pub fn partitioning(&self) -> &Partitioning {
        &self.p
    }

    pub fn cost(&self) -> f64 {
        cost_of(self.p.quality(), self.objective, self.alpha, self.g.n())
    }

    /// Cost change if `v` switched sides.
    pub fn delta(&self, v: Vertex) -> f64 {
        let cg = self.gains[v] as f64;
        match self.objective {
            Objective::MaxCut => -cg,
            Objective::MinQuotientCut => {
                let d = self.p.size_left() as f64 - self.p.size_right() as f64;
                let d2 = match self.p.side(v) {
                    Side::Left => d - 2.0,
                    Side::Right => d + 2.0,
                };
                cg + self.alpha * (d2 * d2 - d * d) / self.g.n() as f64
            }
        }
    }

    pub fn flip(&mut self, v: Vertex) {
        let old = self.p.side(v);
        self.p.flip(self.g, v);
        self.gains[v] = -self.gains[v];
        for &w in self.g.neighbors(v) {
            self.gains[w] += if self.p.side(w) == old { -2 } else { 2 };
        }
    }
}

/// Random single-flip walk from a random partitioning; returns the
/// temperature at which the mean uphill move is accepted with
/// `cfg.init_accept_target`. Falls back to 1 when no uphill move shows up.
pub fn sa_trial_init(g: &Graph, objective: Objective, cfg: &SaConfig, seed: u64) -> f64 {
    let n = g.n();
    if n == 0 {
        return 1.0;
    }
    let mut rng = derived_rng(seed, tag::TRIAL, 0);
    let mut a = Annealer::new(g, init_random(g, &mut rng), objective, cfg.balance_alpha);
    let samples = (cfg.trial_factor * n as f64).ceil() as usize;
    let (mut uphill, mut count) = (0.0, 0usize);
    for _ in 0..samples {
        let v = rng.gen_range(0..n);
        let d = a.delta(v);
        if d > 1e-12 {
            uphill += d;
            count += 1;
        }
        a.flip(v);
    }
    if count == 0 {
        1.0
    } else {
        initial_temperature(uphill / count as f64, cfg.init_accept_target)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SaStats {
    pub starts: usize,
    pub stages: usize,
    pub proposals: u64,
    pub accepted: u64,
    pub initial_temperature: f64,
    /// Cooling ratio chosen for the stretched long run, if there was one.
    pub stretched_ratio: Option<f64>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct SaOutcome {
    pub best: Partitioning,
    pub stats: SaStats,
}

/// Best-so-far snapshot kept in sync lazily: flips since the last snapshot
/// are logged and replayed only when a new incumbent appears.
struct Incumbent {
    sides: Partitioning,
    quality: Quality,
    log: Vec<Vertex>,
    overflow: bool,
}

impl Incumbent {
    fn new(p: &Partitioning) -> Self {
        Incumbent {
            sides: p.clone(),
            quality: p.quality(),
            log: Vec::new(),
            overflow: false,
        }
    }

    fn record_flip(&mut self, v: Vertex) {
        if self.overflow {
            return;
        }
        self.log.push(v);
        if self.log.len() > self.sides.len().max(16) {
            self.log.clear();
            self.overflow = true;
        }
    }

    fn catch_up(&mut self, g: &Graph, current: &Partitioning) {
        if self.overflow {
            self.sides = current.clone();
        } else {
            for &v in &self.log {
                self.sides.flip(g, v);
            }
        }
        self.log.clear();
        self.overflow = false;
        self.quality = current.quality();
        debug_assert_eq!(&self.sides, current);
    }
}

enum Schedule {
    /// Fixed ratio; stop at freeze.
    Standard,
    /// Ratio recomputed after every stage from the mean stage time so far,
    /// so cooling to `T_FREEZE` takes the remaining time.
    Stretched,
}

/// One anneal from `start`. Returns the best partitioning it visited.
#[allow(clippy::too_many_arguments)]
fn anneal_once(
    g: &Graph,
    objective: Objective,
    cfg: &SaConfig,
    t0: f64,
    start: Partitioning,
    schedule: Schedule,
    clock: &Clock,
    rng: &mut Rng,
    stats: &mut SaStats,
) -> Partitioning {
    let n = g.n();
    let mut a = Annealer::new(g, start, objective, cfg.balance_alpha);
    let mut inc = Incumbent::new(&a.p);
    if n == 0 {
        return inc.sides;
    }
    let stage_len = ((cfg.temp_length_factor * n as f64).ceil() as usize).max(1);
    let mut ratio = cfg.cooling_ratio;
    let mut temperature = t0;
    let mut frozen = 0;
    let mut stage = 0usize;
    let run_started = clock.elapsed();
    'stages: loop {
        let mut accepted = 0usize;
        let mut improved = false;
        for i in 0..stage_len {
            if i % CLOCK_STRIDE == 0 && clock.expired() {
                break 'stages;
            }
            let v = rng.gen_range(0..n);
            let d = a.delta(v);
            let take = d <= 0.0 || rng.gen::<f64>() < acceptance_probability(d, temperature);
            if take {
                a.flip(v);
                inc.record_flip(v);
                accepted += 1;
                if objective.better(a.p.quality(), inc.quality) {
                    inc.catch_up(g, &a.p);
                    improved = true;
                }
            }
        }
        stats.stages += 1;
        stats.proposals += stage_len as u64;
        stats.accepted += accepted as u64;
        stage += 1;
        if improved {
            frozen = 0;
        } else if (accepted as f64) < cfg.freeze_accept * stage_len as f64 {
            frozen += 1;
        }
        if let (Schedule::Stretched, Some(remaining)) = (&schedule, clock.remaining()) {
            let per_stage =
                ((clock.elapsed() - run_started).as_secs_f64() / stage as f64).max(1e-9);
            let stages_left = (remaining.as_secs_f64() / per_stage).floor().max(1.0);
            if temperature > T_FREEZE {
                ratio = (T_FREEZE / temperature)
                    .powf(1.0 / stages_left)
                    .clamp(0.5, 0.999_999);
            }
        }
        let stretching = matches!(schedule, Schedule::Stretched) && temperature > T_FREEZE;
        if !stretching && (frozen >= cfg.freeze_stages || temperature < t0 * T_FLOOR_FRACTION) {
            break;
        }
        temperature *= ratio;
    }
    if let Schedule::Stretched = schedule {
        stats.stretched_ratio = Some(ratio);
    }
    inc.sides
}

/// Annealing within `budget`. In long-run mode one anneal with a stretched
/// schedule takes the whole budget (any time left after it freezes goes to
/// standard restarts); otherwise standard anneals from fresh `init`
/// partitionings repeat until the budget is spent. Returns the best
/// partitioning visited.
pub fn sa_run(
    g: &Graph,
    objective: Objective,
    cfg: &SaConfig,
    budget: Budget,
    seed: u64,
    init: InitMethod,
) -> Result<SaOutcome> {
    cfg.validate()?;
    let mut stats = SaStats::default();
    let t0_before = if cfg.exclude_trial {
        Some(sa_trial_init(g, objective, cfg, seed))
    } else {
        None
    };
    let clock = budget.start();
    let t0 = t0_before.unwrap_or_else(|| sa_trial_init(g, objective, cfg, seed));
    stats.initial_temperature = t0;

    let mut best: Option<Partitioning> = None;
    while clock.may_start(stats.starts) {
        let mut rng = derived_rng(seed, tag::RESTART, stats.starts as u64);
        let start = init.generate(g, objective, &mut rng)?;
        let schedule = if cfg.long_run && stats.starts == 0 && clock.limit().is_some() {
            Schedule::Stretched
        } else {
            Schedule::Standard
        };
        stats.starts += 1;
        let p = anneal_once(
            g, objective, cfg, t0, start, schedule, &clock, &mut rng, &mut stats,
        );
        if best
            .as_ref()
            .is_none_or(|b| objective.better(p.quality(), b.quality()))
        {
            best = Some(p);
        }
    }
    let best = match best {
        Some(b) => b,
        None => {
            let mut rng = derived_rng(seed, tag::RESTART, 0);
            init.generate(g, objective, &mut rng)?
        }
    };
    stats.elapsed = clock.elapsed();
    Ok(SaOutcome { best, stats })
}

//! Path optimization.
//!
//! Instead of moving one vertex at a time, each step grows a path of
//! vertices alternating between the two sides and flips the whole path.
//! The flip-cost of the path (change in cut count when every path vertex
//! switches sides) is kept incrementally: edges with both endpoints on the
//! path keep their cut status, so each new vertex contributes its external
//! edges and cancels the contribution its path neighbors had already
//! counted for the shared edge.
//!
//! Growth rule:
//! * max-cut: the next vertex is an opposite-side neighbor of the most
//!   recent path vertex;
//! * min-quotient-cut: the next vertex is a neighbor of the second most
//!   recent path vertex that shares its side (for the second vertex, an
//!   opposite-side neighbor of the start).
//!
//! Candidates are scanned in adjacency order and the first one whose
//! increment does not make the flip-cost worse is taken.

use std::time::Duration;

use rand::seq::SliceRandom;

use crate::buckets::GainBuckets;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::init::construct_w;
use crate::partition::{gain_unchecked, Objective, Partitioning, Quality, Side};
use crate::rng::{derived_rng, tag, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoConfig {
    /// Best-gain vertices tried as path starts per iteration.
    pub k_starts: usize,
    /// Consecutive iterations without an accepted path before restarting.
    pub stale_iters: usize,
    /// Consecutive restarts without a new incumbent before halting;
    /// `None` keeps restarting until the budget is spent.
    pub stale_restarts: Option<usize>,
    /// Also flip paths that leave the objective unchanged. Such flips do
    /// not reset the stale counter.
    pub accept_ties: bool,
}

impl Default for PoConfig {
    fn default() -> Self {
        PoConfig {
            k_starts: 10,
            stale_iters: 5,
            stale_restarts: Some(5),
            accept_ties: false,
        }
    }
}

impl PoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_starts == 0 || self.stale_iters == 0 || self.stale_restarts == Some(0) {
            return Err(Error::Infeasible(
                "path optimizer counts must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// An alternating vertex sequence with its running flip-cost.
#[derive(Debug, Clone)]
pub struct AltPath {
    seq: Vec<Vertex>,
    in_path: Vec<bool>,
    // (flip_cost, side_delta) after each prefix length 1..=len
    prefix: Vec<(i64, i64)>,
}

impl AltPath {
    pub fn new(n: usize) -> Self {
        AltPath {
            seq: Vec::new(),
            in_path: vec![false; n],
            prefix: Vec::new(),
        }
    }

    pub fn seq(&self) -> &[Vertex] {
        &self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.in_path[v]
    }

    /// Change in cut count if every path vertex switched sides.
    pub fn flip_cost(&self) -> i64 {
        self.prefix.last().map_or(0, |p| p.0)
    }

    /// Vertices moving LEFT→RIGHT minus vertices moving RIGHT→LEFT.
    pub fn side_delta(&self) -> i64 {
        self.prefix.last().map_or(0, |p| p.1)
    }

    /// `(flip_cost, side_delta)` of the first `len` vertices.
    pub fn prefix(&self, len: usize) -> (i64, i64) {
        if len == 0 {
            (0, 0)
        } else {
            self.prefix[len - 1]
        }
    }

    fn clear(&mut self) {
        for &v in &self.seq {
            self.in_path[v] = false;
        }
        self.seq.clear();
        self.prefix.clear();
    }

    fn push(&mut self, v: Vertex, side: Side, delta: i64) {
        let (cost, sd) = self.prefix(self.len());
        let step = match side {
            Side::Left => 1,
            Side::Right => -1,
        };
        self.seq.push(v);
        self.in_path[v] = true;
        self.prefix.push((cost + delta, sd + step));
    }

    /// Partition quality after flipping the first `len` vertices.
    pub fn quality_after(&self, current: Quality, len: usize) -> Quality {
        let (cost, sd) = self.prefix(len);
        Quality {
            cut: (current.cut as i64 + cost) as usize,
            left: (current.left as i64 - sd) as usize,
            right: (current.right as i64 + sd) as usize,
        }
    }
}

#[inline]
fn increment(g: &Graph, p: &Partitioning, path: &AltPath, v: Vertex) -> i64 {
    let sv = p.side(v);
    let mut delta = 0;
    for &w in g.neighbors(v) {
        let same = p.side(w) == sv;
        delta += match (path.contains(w), same) {
            // external edge: flipping v cuts it if it was uncut
            (false, true) => 1,
            (false, false) => -1,
            // edge to a path vertex becomes internal: undo w's count for it
            (true, true) => -1,
            (true, false) => 1,
        };
    }
    delta
}

#[inline]
fn favorable(objective: Objective, delta: i64) -> bool {
    match objective {
        Objective::MaxCut => delta >= 0,
        Objective::MinQuotientCut => delta <= 0,
    }
}

/// Flip-cost change from appending `v` to `path`, and whether the change is
/// acceptable for `objective` (non-negative for max-cut, non-positive for
/// min-quotient-cut).
pub fn flip_cost_incr(
    g: &Graph,
    p: &Partitioning,
    path: &AltPath,
    v: Vertex,
    objective: Objective,
) -> Result<(i64, bool)> {
    if v >= g.n() {
        return Err(Error::VertexOutOfRange(v));
    }
    if path.contains(v) {
        return Err(Error::InvalidExtension(format!(
            "vertex {v} already on the path"
        )));
    }
    if let Some(&last) = path.seq.last() {
        if p.side(last) == p.side(v) {
            return Err(Error::InvalidExtension(format!(
                "vertex {v} is on the same side as the path end {last}"
            )));
        }
    }
    let delta = increment(g, p, path, v);
    Ok((delta, favorable(objective, delta)))
}

/// Grows a path from `start` until no candidate is favorable.
pub fn develop_path(g: &Graph, p: &Partitioning, start: Vertex, objective: Objective) -> AltPath {
    let mut path = AltPath::new(g.n());
    develop_into(g, p, start, objective, &mut path);
    path
}

fn develop_into(
    g: &Graph,
    p: &Partitioning,
    start: Vertex,
    objective: Objective,
    path: &mut AltPath,
) {
    path.clear();
    let d0 = gain_unchecked(g, p, start);
    path.push(start, p.side(start), d0);
    loop {
        let last = *path.seq.last().unwrap();
        let want = p.side(last).other();
        let anchor = match objective {
            Objective::MaxCut => last,
            Objective::MinQuotientCut if path.len() >= 2 => path.seq[path.len() - 2],
            Objective::MinQuotientCut => last,
        };
        let mut chosen = None;
        for &w in g.neighbors(anchor) {
            if path.contains(w) || p.side(w) != want {
                continue;
            }
            let delta = increment(g, p, path, w);
            if favorable(objective, delta) {
                chosen = Some((w, delta));
                break;
            }
        }
        match chosen {
            Some((w, delta)) => path.push(w, want, delta),
            None => break,
        }
    }
}

/// Run statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PoStats {
    pub starts: usize,
    pub iterations: usize,
    pub accepted_paths: usize,
    pub flipped_vertices: usize,
    pub elapsed: Duration,
}

impl PoStats {
    pub fn mean_path_length(&self) -> f64 {
        if self.accepted_paths == 0 {
            0.0
        } else {
            self.flipped_vertices as f64 / self.accepted_paths as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct PoOutcome {
    pub best: Partitioning,
    pub stats: PoStats,
}

/// Working state for one optimization run: the current partitioning with
/// cell gains bucketed for best-gain start selection.
struct Climber<'g> {
    g: &'g Graph,
    objective: Objective,
    p: Partitioning,
    gains: Vec<i64>,
    buckets: GainBuckets,
    path: AltPath,
    starts: Vec<Vertex>,
    scratch: Vec<Vertex>,
}

impl<'g> Climber<'g> {
    fn new(g: &'g Graph, objective: Objective, p: Partitioning) -> Self {
        let n = g.n();
        let mut c = Climber {
            g,
            objective,
            p,
            gains: vec![0; n],
            buckets: GainBuckets::new(n, g.max_degree()),
            path: AltPath::new(n),
            starts: Vec::new(),
            scratch: Vec::new(),
        };
        c.rebuild();
        c
    }

    fn reset(&mut self, p: Partitioning) {
        self.p = p;
        self.rebuild();
    }

    fn rebuild(&mut self) {
        for v in 0..self.g.n() {
            if self.buckets.contains(v) {
                self.buckets.remove(v);
            }
            self.gains[v] = gain_unchecked(self.g, &self.p, v);
            self.buckets.insert(v, self.gains[v]);
        }
    }

    /// The `k` best-gain vertices, ties in random order.
    fn pick_starts(&mut self, k: usize, rng: &mut Rng) {
        self.starts.clear();
        let descending = self.objective.is_maximization();
        for key in self.buckets.keys(descending) {
            self.scratch.clear();
            self.scratch.extend(self.buckets.bucket(key));
            self.scratch.shuffle(rng);
            let need = k - self.starts.len();
            self.starts.extend(self.scratch.iter().take(need).copied());
            if self.starts.len() == k {
                break;
            }
        }
    }

    fn flip(&mut self, v: Vertex) {
        let old = self.p.side(v);
        self.p.flip(self.g, v);
        self.gains[v] = -self.gains[v];
        self.buckets.update(v, self.gains[v]);
        for &w in self.g.neighbors(v) {
            self.gains[w] += if self.p.side(w) == old { -2 } else { 2 };
            self.buckets.update(w, self.gains[w]);
        }
    }

    /// One iteration: try the best starts in order and flip the first path
    /// that strictly improves the objective (or keeps it unchanged, with
    /// `accept_ties`). Returns the flipped length and whether it improved.
    fn iterate(&mut self, k: usize, accept_ties: bool, rng: &mut Rng) -> Option<(usize, bool)> {
        self.pick_starts(k, rng);
        let current = self.p.quality();
        for i in 0..self.starts.len() {
            let s = self.starts[i];
            develop_into(self.g, &self.p, s, self.objective, &mut self.path);
            // best prefix, ties to the longer one
            let mut best_len = 0;
            let mut best_q = current;
            for len in 1..=self.path.len() {
                let q = self.path.quality_after(current, len);
                let acceptable = if accept_ties {
                    self.objective.compare(q, current) != std::cmp::Ordering::Less
                } else {
                    self.objective.better(q, current)
                };
                if acceptable && self.objective.compare(q, best_q) != std::cmp::Ordering::Less {
                    best_len = len;
                    best_q = q;
                }
            }
            if best_len > 0 {
                for j in 0..best_len {
                    let v = self.path.seq[j];
                    self.flip(v);
                }
                debug_assert_eq!(self.p.quality(), best_q);
                self.p.debug_check(self.g);
                return Some((best_len, self.objective.better(best_q, current)));
            }
        }
        None
    }
}

/// Runs path optimization from `p0`, restarting from fresh W partitionings
/// when a start goes stale, and returns the best partitioning seen.
pub fn po_optimize(
    g: &Graph,
    p0: &Partitioning,
    objective: Objective,
    cfg: &PoConfig,
    budget: Budget,
    seed: u64,
) -> Result<PoOutcome> {
    cfg.validate()?;
    if p0.len() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            got: p0.len(),
        });
    }
    let clock = budget.start();
    let mut stats = PoStats::default();
    let mut best = p0.clone();
    if g.n() == 0 {
        return Ok(PoOutcome { best, stats });
    }
    let mut start_rng = derived_rng(seed, tag::STARTS, 0);
    let mut climber = Climber::new(g, objective, p0.clone());
    let mut unimproved_restarts = 0;

    'run: while clock.may_start(stats.starts) {
        if stats.starts > 0 {
            let mut rng = derived_rng(seed, tag::RESTART, stats.starts as u64);
            climber.reset(construct_w(g, objective, &mut rng));
        }
        stats.starts += 1;
        let mut stale = 0;
        while stale < cfg.stale_iters {
            if clock.expired() {
                if objective.better(climber.p.quality(), best.quality()) {
                    best = climber.p.clone();
                }
                break 'run;
            }
            stats.iterations += 1;
            match climber.iterate(cfg.k_starts, cfg.accept_ties, &mut start_rng) {
                Some((len, improved)) => {
                    stats.accepted_paths += 1;
                    stats.flipped_vertices += len;
                    if improved {
                        stale = 0;
                    } else {
                        stale += 1;
                    }
                }
                None => stale += 1,
            }
        }
        if objective.better(climber.p.quality(), best.quality()) {
            best = climber.p.clone();
            unimproved_restarts = 0;
        } else {
            unimproved_restarts += 1;
            if cfg
                .stale_restarts
                .is_some_and(|limit| unimproved_restarts >= limit)
            {
                break;
            }
        }
    }
    stats.elapsed = clock.elapsed();
    Ok(PoOutcome { best, stats })
}

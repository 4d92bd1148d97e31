//! Kernighan–Lin local search in the Fiduccia–Mattheyses single-move form.
//!
//! A pass moves every vertex at most once, always taking the best unlocked
//! move even when it makes things worse, then rolls back to the best prefix
//! of the move sequence. Each side keeps its own gain buckets keyed by the
//! edge-cut improvement of moving that vertex: `cg(v)` for max-cut and
//! `-cg(v)` for min-quotient-cut.

use std::time::Duration;

use crate::buckets::GainBuckets;
use crate::budget::{Budget, Clock};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::init::InitMethod;
use crate::partition::{gain_unchecked, Objective, Partitioning, Quality, Side};
use crate::rng::{derived_rng, tag};

/// Moves between budget checks inside a pass.
const CLOCK_STRIDE: usize = 256;

/// One pass worth of state: the partitioning, cached cell gains and
/// per-side buckets of unlocked vertices.
pub struct FmEngine<'g> {
    g: &'g Graph,
    objective: Objective,
    p: Partitioning,
    gains: Vec<i64>,
    buckets: [GainBuckets; 2],
    locked: Vec<bool>,
}

impl<'g> FmEngine<'g> {
    pub fn new(g: &'g Graph, p: Partitioning, objective: Objective) -> Self {
        let n = g.n();
        let maxd = g.max_degree();
        let mut e = FmEngine {
            g,
            objective,
            p,
            gains: vec![0; n],
            buckets: [GainBuckets::new(n, maxd), GainBuckets::new(n, maxd)],
            locked: vec![false; n],
        };
        for v in 0..n {
            e.gains[v] = gain_unchecked(g, &e.p, v);
            let key = e.key(v);
            e.buckets[e.p.side(v).index()].insert(v, key);
        }
        e
    }

    #[inline]
    fn key(&self, v: Vertex) -> i64 {
        match self.objective {
            Objective::MaxCut => self.gains[v],
            Objective::MinQuotientCut => -self.gains[v],
        }
    }

    pub fn partitioning(&self) -> &Partitioning {
        &self.p
    }

    pub fn into_partitioning(self) -> Partitioning {
        self.p
    }

    /// Cached cell gain of `v`.
    pub fn gain(&self, v: Vertex) -> i64 {
        self.gains[v]
    }

    pub fn is_locked(&self, v: Vertex) -> bool {
        self.locked[v]
    }

    fn quality_after(&self, v: Vertex) -> Quality {
        let mut q = self.p.quality();
        q.cut = (q.cut as i64 + self.gains[v]) as usize;
        match self.p.side(v) {
            Side::Left => {
                q.left -= 1;
                q.right += 1;
            }
            Side::Right => {
                q.right -= 1;
                q.left += 1;
            }
        }
        q
    }

    /// The next move of the pass, if any unlocked vertex may move.
    ///
    /// Max-cut takes the highest key over both sides. Min-quotient-cut
    /// takes the front vertex of each side's top bucket, scores both by the
    /// exact quotient after the move and never empties a side. Ties go to
    /// the lower vertex id.
    pub fn select_move(&mut self) -> Option<Vertex> {
        let mut best: Option<(Vertex, i64, Quality)> = None;
        for s in [Side::Left, Side::Right] {
            if self.objective == Objective::MinQuotientCut && self.p.size(s) <= 1 {
                continue;
            }
            let Some((key, v)) = self.buckets[s.index()].max() else {
                continue;
            };
            let q = self.quality_after(v);
            let wins = match best {
                None => true,
                Some((bv, bkey, bq)) => {
                    let ord = match self.objective {
                        Objective::MaxCut => key.cmp(&bkey),
                        Objective::MinQuotientCut => self.objective.compare(q, bq),
                    };
                    ord.then(bv.cmp(&v)) == std::cmp::Ordering::Greater
                }
            };
            if wins {
                best = Some((v, key, q));
            }
        }
        best.map(|b| b.0)
    }

    /// Moves `v`, locks it and updates the gains of its unlocked neighbors.
    pub fn apply_move(&mut self, v: Vertex) {
        debug_assert!(!self.locked[v]);
        let old = self.p.side(v);
        self.buckets[old.index()].remove(v);
        self.locked[v] = true;
        self.p.flip(self.g, v);
        self.gains[v] = -self.gains[v];
        for &w in self.g.neighbors(v) {
            self.gains[w] += if self.p.side(w) == old { -2 } else { 2 };
            if !self.locked[w] {
                let key = self.key(w);
                self.buckets[self.p.side(w).index()].update(w, key);
            }
        }
    }

    /// Undoes a move without touching locks or buckets (rollback only).
    fn revert(&mut self, v: Vertex) {
        self.p.flip(self.g, v);
    }
}

/// Record of one pass.
#[derive(Debug, Clone, Default)]
pub struct PassRecord {
    pub moves: Vec<Vertex>,
    pub best_prefix: usize,
}

fn run_pass(
    g: &Graph,
    p: Partitioning,
    objective: Objective,
    clock: Option<&Clock>,
) -> (Partitioning, bool, PassRecord) {
    let start = p.quality();
    let mut engine = FmEngine::new(g, p, objective);
    let mut best = start;
    let mut record = PassRecord::default();
    while let Some(v) = engine.select_move() {
        engine.apply_move(v);
        record.moves.push(v);
        let q = engine.p.quality();
        if objective.better(q, best) {
            best = q;
            record.best_prefix = record.moves.len();
        }
        if record.moves.len() % CLOCK_STRIDE == 0 && clock.is_some_and(Clock::expired) {
            break;
        }
    }
    for &v in record.moves[record.best_prefix..].iter().rev() {
        engine.revert(v);
    }
    let p = engine.into_partitioning();
    p.debug_check(g);
    debug_assert_eq!(p.quality(), best);
    (p, record.best_prefix > 0, record)
}

/// One FM pass from `p`, rolled back to its best prefix.
pub fn fm_pass(g: &Graph, p: &Partitioning, objective: Objective) -> (Partitioning, bool) {
    let (p, improved, _) = run_pass(g, p.clone(), objective, None);
    (p, improved)
}

/// Like [`fm_pass`] but also returns the move sequence.
pub fn fm_pass_recorded(
    g: &Graph,
    p: &Partitioning,
    objective: Objective,
) -> (Partitioning, bool, PassRecord) {
    run_pass(g, p.clone(), objective, None)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FmStats {
    pub starts: usize,
    pub passes: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct FmOutcome {
    pub best: Partitioning,
    pub stats: FmStats,
}

/// Repeats passes until one fails to improve, then restarts from a fresh
/// partitioning drawn with `init`; keeps the best over all starts.
pub fn fm_optimize(
    g: &Graph,
    p0: &Partitioning,
    objective: Objective,
    budget: Budget,
    seed: u64,
    init: InitMethod,
) -> Result<FmOutcome> {
    if p0.len() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            got: p0.len(),
        });
    }
    let clock = budget.start();
    let mut stats = FmStats::default();
    let mut best = p0.clone();
    while clock.may_start(stats.starts) {
        let mut p = if stats.starts == 0 {
            p0.clone()
        } else {
            let mut rng = derived_rng(seed, tag::RESTART, stats.starts as u64);
            init.generate(g, objective, &mut rng)?
        };
        stats.starts += 1;
        loop {
            let (next, improved, _) = run_pass(g, p, objective, Some(&clock));
            p = next;
            stats.passes += 1;
            if !improved || clock.expired() {
                break;
            }
        }
        if objective.better(p.quality(), best.quality()) {
            best = p;
        }
    }
    stats.elapsed = clock.elapsed();
    Ok(FmOutcome { best, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;

    fn random_partition(g: &Graph, seed: u64) -> Partitioning {
        crate::init::init_random(g, &mut rng_from_seed(seed))
    }

    #[test]
    fn triangle_pass() {
        let g = k(3);
        let (p, improved, rec) =
            fm_pass_recorded(&g, &Partitioning::all_left(&g), Objective::MaxCut);
        assert!(improved);
        assert_eq!(rec.best_prefix, 1);
        assert_eq!(p.cut(), 2);
    }

    #[test]
    fn optimal_cycle_is_left_alone() {
        let g = cycle(4);
        let p = Partitioning::from_left_set(&g, &[0, 2]).unwrap();
        let (q, improved) = fm_pass(&g, &p, Objective::MaxCut);
        assert!(!improved);
        assert_eq!(q, p);
    }

    #[test]
    fn quotient_pass_never_worse() {
        for seed in 0..20 {
            let g = crate::gen::gen_random(16, 0.4, seed);
            let p = random_partition(&g, seed);
            let (q, _) = fm_pass(&g, &p, Objective::MinQuotientCut);
            assert_eq!(q.cut(), crate::partition::cut_count(&g, &q).unwrap());
            assert!(!Objective::MinQuotientCut.better(p.quality(), q.quality()));
            assert!(q.size_left() > 0 && q.size_right() > 0);
        }
    }

    #[test]
    fn optimize_k4() {
        let g = k(4);
        let out = fm_optimize(
            &g,
            &Partitioning::all_left(&g),
            Objective::MaxCut,
            Budget::restarts(5),
            1,
            InitMethod::Random,
        )
        .unwrap();
        assert_eq!(out.best.cut(), 4);
    }

    #[test]
    fn zero_budget() {
        let g = crate::gen::gen_random(40, 0.2, 3);
        let p0 = random_partition(&g, 3);
        let out = fm_optimize(
            &g,
            &p0,
            Objective::MaxCut,
            Budget::time(Duration::ZERO),
            1,
            InitMethod::Random,
        )
        .unwrap();
        assert!(out.stats.starts <= 1);
        assert!(!Objective::MaxCut.better(p0.quality(), out.best.quality()));
    }

    proptest! {
        #[test]
        fn gains_track_recount_through_a_pass(n in 2usize..64, d in 0.0f64..0.6, seed: u64, maxcut: bool) {
            let g = crate::gen::gen_random(n, d, seed);
            let obj = if maxcut { Objective::MaxCut } else { Objective::MinQuotientCut };
            let mut e = FmEngine::new(&g, random_partition(&g, seed), obj);
            let mut moved = vec![false; n];
            while let Some(v) = e.select_move() {
                prop_assert!(!std::mem::replace(&mut moved[v], true));
                e.apply_move(v);
                for w in 0..n {
                    prop_assert_eq!(e.gain(w), gain_unchecked(&g, e.partitioning(), w));
                }
            }
        }

        #[test]
        fn rollback_equals_prefix_replay(n in 2usize..50, d in 0.0f64..0.6, seed: u64, maxcut: bool) {
            let g = crate::gen::gen_random(n, d, seed);
            let obj = if maxcut { Objective::MaxCut } else { Objective::MinQuotientCut };
            let p = random_partition(&g, seed);
            let (q, improved, rec) = fm_pass_recorded(&g, &p, obj);
            let mut replay = p.clone();
            crate::partition::apply_flip_flop(&g, &mut replay, &rec.moves[..rec.best_prefix]).unwrap();
            prop_assert_eq!(&replay, &q);
            prop_assert_eq!(improved, obj.better(q.quality(), p.quality()));
        }
    }
}

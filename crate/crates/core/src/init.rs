//! Initial partitionings: uniform random, the geometric line split, and the
//! constructive greedy W algorithm with max-diff / min-diff selection.

use std::str::FromStr;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::partition::{Objective, Partitioning, Side};
use crate::rng::Rng;

/// Each vertex LEFT or RIGHT with probability 1/2.
pub fn init_random(g: &Graph, rng: &mut Rng) -> Partitioning {
    let side = (0..g.n()).map(|_| Side::from_bit(rng.gen())).collect();
    Partitioning::new(g, side).expect("one label per vertex")
}

/// Splits a geometric graph into halves with a line of random slope.
pub fn init_line(g: &Graph, rng: &mut Rng) -> Result<Partitioning> {
    let theta = rng.gen_range(0.0..std::f64::consts::PI);
    init_line_at(g, theta)
}

/// Projects every point onto `(cos θ, sin θ)`; the `⌊n/2⌋` smallest
/// projections (ties by vertex id) go LEFT.
pub fn init_line_at(g: &Graph, theta: f64) -> Result<Partitioning> {
    let coords = g.coords().ok_or(Error::MissingCoords)?;
    let (c, s) = (theta.cos(), theta.sin());
    let mut order: Vec<(f64, Vertex)> = coords
        .iter()
        .enumerate()
        .map(|(v, &(x, y))| (x * c + y * s, v))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut side = vec![Side::Right; g.n()];
    for &(_, v) in &order[..g.n() / 2] {
        side[v] = Side::Left;
    }
    Partitioning::new(g, side)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffMode {
    MaxDiff,
    MinDiff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    Random,
    MaxDegreeThenRandom,
}

/// Placement bookkeeping for constructive algorithms.
///
/// For every unplaced vertex it tracks how many of its placed neighbors sit
/// on each side, and buckets unplaced vertices by
/// `δ(v) = |n_left(v) − n_right(v)|` so max-diff and min-diff selection
/// cost `O(max degree)` plus the tie-break.
#[derive(Debug, Clone)]
pub struct DiffState {
    placed: Vec<bool>,
    placed_on: [Vec<u32>; 2],
    degree: Vec<usize>,
    buckets: Vec<Vec<Vertex>>,
    pos: Vec<usize>,
    unplaced: usize,
    unplaced_edges: usize,
}

impl DiffState {
    pub fn new(g: &Graph) -> Self {
        let degree = (0..g.n()).map(|v| g.degree(v)).collect();
        let mut st = DiffState::with_degrees(degree);
        st.unplaced_edges = g.m();
        st
    }

    fn with_degrees(degree: Vec<usize>) -> Self {
        let n = degree.len();
        let max_delta = degree.iter().copied().max().unwrap_or(0);
        let mut buckets = vec![Vec::new(); max_delta + 1];
        buckets[0] = (0..n).collect();
        DiffState {
            placed: vec![false; n],
            placed_on: [vec![0; n], vec![0; n]],
            degree,
            buckets,
            pos: (0..n).collect(),
            unplaced: n,
            unplaced_edges: 0,
        }
    }

    /// Builds a state with explicit per-vertex placed-neighbor counts, all
    /// vertices unplaced. Used to exercise selection in isolation.
    pub fn from_counts(left: &[u32], right: &[u32], degree: Vec<usize>) -> Self {
        let n = degree.len();
        assert!(left.len() == n && right.len() == n);
        let max_delta = degree
            .iter()
            .copied()
            .chain(left.iter().chain(right).map(|&c| c as usize))
            .max()
            .unwrap_or(0);
        let mut st = DiffState::with_degrees(degree);
        st.buckets = vec![Vec::new(); max_delta + 1];
        st.placed_on = [left.to_vec(), right.to_vec()];
        for v in 0..n {
            let d = st.delta(v);
            st.pos[v] = st.buckets[d].len();
            st.buckets[d].push(v);
        }
        st
    }

    pub fn is_placed(&self, v: Vertex) -> bool {
        self.placed[v]
    }

    pub fn unplaced(&self) -> usize {
        self.unplaced
    }

    /// Placed neighbors of `v` on LEFT and RIGHT.
    pub fn counts(&self, v: Vertex) -> (usize, usize) {
        (self.placed_on[0][v] as usize, self.placed_on[1][v] as usize)
    }

    pub fn delta(&self, v: Vertex) -> usize {
        self.placed_on[0][v].abs_diff(self.placed_on[1][v]) as usize
    }

    /// Average degree of the subgraph induced by the unplaced vertices.
    pub fn unplaced_average_degree(&self) -> f64 {
        if self.unplaced == 0 {
            0.0
        } else {
            2.0 * self.unplaced_edges as f64 / self.unplaced as f64
        }
    }

    fn unlink(&mut self, v: Vertex) {
        let d = self.delta(v);
        let i = self.pos[v];
        let bucket = &mut self.buckets[d];
        bucket.swap_remove(i);
        if let Some(&moved) = bucket.get(i) {
            self.pos[moved] = i;
        }
    }

    fn link(&mut self, v: Vertex) {
        let d = self.delta(v);
        self.pos[v] = self.buckets[d].len();
        self.buckets[d].push(v);
    }

    /// Marks `v` placed on `side` and updates its unplaced neighbors.
    pub fn place(&mut self, g: &Graph, v: Vertex, side: Side) {
        assert!(!self.placed[v], "vertex {v} placed twice");
        self.unlink(v);
        self.placed[v] = true;
        self.unplaced -= 1;
        for &w in g.neighbors(v) {
            if !self.placed[w] {
                self.unplaced_edges -= 1;
                self.unlink(w);
                self.placed_on[side.index()][w] += 1;
                self.link(w);
            }
        }
    }

    /// Picks the next vertex: a uniformly random member of `argmax δ`
    /// (max-diff) or `argmin δ` (min-diff), optionally preferring the
    /// highest degree among the tied vertices.
    pub fn select(&self, mode: DiffMode, tiebreak: TieBreak, rng: &mut Rng) -> Result<Vertex> {
        let bucket = match mode {
            DiffMode::MaxDiff => self.buckets.iter().rev().find(|b| !b.is_empty()),
            DiffMode::MinDiff => self.buckets.iter().find(|b| !b.is_empty()),
        }
        .ok_or(Error::NothingToSelect)?;
        match tiebreak {
            TieBreak::Random => Ok(bucket[rng.gen_range(0..bucket.len())]),
            TieBreak::MaxDegreeThenRandom => {
                let top = bucket.iter().map(|&v| self.degree[v]).max().unwrap();
                // reservoir sample over the top-degree members
                let mut chosen = None;
                let mut seen = 0u32;
                for &v in bucket {
                    if self.degree[v] == top {
                        seen += 1;
                        if rng.gen_range(0..seen) == 0 {
                            chosen = Some(v);
                        }
                    }
                }
                Ok(chosen.unwrap())
            }
        }
    }
}

/// Free-function form of [`DiffState::select`].
pub fn select_diff(
    state: &DiffState,
    mode: DiffMode,
    tiebreak: TieBreak,
    rng: &mut Rng,
) -> Result<Vertex> {
    state.select(mode, tiebreak, rng)
}

/// What a placement rule sees when deciding where the selected vertex goes.
#[derive(Debug, Clone, Copy)]
pub struct PlacementChoice {
    /// 1-based placement index.
    pub step: usize,
    pub vertex: Vertex,
    /// Edges newly cut if the vertex goes LEFT / RIGHT.
    pub cut_if: [usize; 2],
    /// Current side sizes.
    pub sizes: [usize; 2],
    /// Average degree of the unplaced subgraph before this placement.
    pub unplaced_avg_degree: f64,
}

impl PlacementChoice {
    pub fn cut_added(&self, side: Side) -> usize {
        self.cut_if[side.index()]
    }

    /// The locally better side for `objective`, or `None` on a tie.
    /// Min-quotient breaks raw-cut ties toward the smaller side.
    pub fn better_side(&self, objective: Objective) -> Option<Side> {
        let [l, r] = self.cut_if;
        match objective {
            Objective::MaxCut => match l.cmp(&r) {
                std::cmp::Ordering::Greater => Some(Side::Left),
                std::cmp::Ordering::Less => Some(Side::Right),
                std::cmp::Ordering::Equal => None,
            },
            Objective::MinQuotientCut => match l.cmp(&r) {
                std::cmp::Ordering::Less => Some(Side::Left),
                std::cmp::Ordering::Greater => Some(Side::Right),
                std::cmp::Ordering::Equal => match self.sizes[0].cmp(&self.sizes[1]) {
                    std::cmp::Ordering::Less => Some(Side::Left),
                    std::cmp::Ordering::Greater => Some(Side::Right),
                    std::cmp::Ordering::Equal => None,
                },
            },
        }
    }

    /// Whether `side` is at least as good as the other side on raw cut
    /// contribution alone.
    pub fn is_greedy(&self, objective: Objective, side: Side) -> bool {
        let (here, there) = (self.cut_added(side), self.cut_added(side.other()));
        match objective {
            Objective::MaxCut => here >= there,
            Objective::MinQuotientCut => here <= there,
        }
    }
}

/// Generic constructive placement: select with `mode`/`tiebreak`, let
/// `rule` choose the side. Returns the partitioning and every decision.
pub fn construct<F>(
    g: &Graph,
    mode: DiffMode,
    tiebreak: TieBreak,
    rng: &mut Rng,
    mut rule: F,
) -> (Partitioning, Vec<(PlacementChoice, Side)>)
where
    F: FnMut(&PlacementChoice, &mut Rng) -> Side,
{
    let n = g.n();
    let mut state = DiffState::new(g);
    let mut side = vec![Side::Left; n];
    let mut sizes = [0usize; 2];
    let mut trace = Vec::with_capacity(n);
    for step in 1..=n {
        let v = state
            .select(mode, tiebreak, rng)
            .expect("unplaced vertices remain");
        let (on_left, on_right) = state.counts(v);
        let choice = PlacementChoice {
            step,
            vertex: v,
            cut_if: [on_right, on_left],
            sizes,
            unplaced_avg_degree: state.unplaced_average_degree(),
        };
        let s = rule(&choice, rng);
        state.place(g, v, s);
        side[v] = s;
        sizes[s.index()] += 1;
        trace.push((choice, s));
    }
    let p = Partitioning::new(g, side).expect("one label per vertex");
    (p, trace)
}

fn random_side(rng: &mut Rng) -> Side {
    Side::from_bit(rng.gen())
}

/// Places `choice` on its locally better side, random on a full tie.
pub fn greedy_side(choice: &PlacementChoice, objective: Objective, rng: &mut Rng) -> Side {
    choice
        .better_side(objective)
        .unwrap_or_else(|| random_side(rng))
}

/// The W algorithm: max-diff selection for max-cut, min-diff for
/// min-quotient, each vertex placed greedily.
pub fn construct_w(g: &Graph, objective: Objective, rng: &mut Rng) -> Partitioning {
    let mode = match objective {
        Objective::MaxCut => DiffMode::MaxDiff,
        Objective::MinQuotientCut => DiffMode::MinDiff,
    };
    construct(g, mode, TieBreak::Random, rng, |c, rng| {
        greedy_side(c, objective, rng)
    })
    .0
}

/// How restarts obtain a fresh starting partitioning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitMethod {
    Random,
    Line,
    W,
}

impl InitMethod {
    pub fn name(self) -> &'static str {
        match self {
            InitMethod::Random => "random",
            InitMethod::Line => "line",
            InitMethod::W => "w",
        }
    }

    pub fn generate(self, g: &Graph, objective: Objective, rng: &mut Rng) -> Result<Partitioning> {
        match self {
            InitMethod::Random => Ok(init_random(g, rng)),
            InitMethod::Line => init_line(g, rng),
            InitMethod::W => Ok(construct_w(g, objective, rng)),
        }
    }
}

impl FromStr for InitMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "random" => Ok(InitMethod::Random),
            "line" => Ok(InitMethod::Line),
            "w" | "W" => Ok(InitMethod::W),
            other => Err(format!("unknown init method `{other}` (random|line|w)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;

    fn exhaustive_max_cut(g: &Graph) -> usize {
        (0u32..1 << g.n())
            .map(|mask| {
                g.edges()
                    .iter()
                    .filter(|&&(u, v)| (mask >> u) & 1 != (mask >> v) & 1)
                    .count()
            })
            .max()
            .unwrap()
    }

    #[test]
    fn random_init() {
        let g = Graph::empty(1);
        let p = init_random(&g, &mut rng_from_seed(1));
        assert_eq!(p.len(), 1);
        let g = Graph::empty(10_000);
        let a = init_random(&g, &mut rng_from_seed(5));
        let b = init_random(&g, &mut rng_from_seed(5));
        assert_eq!(a, b);
        assert!((a.size_left() as f64 - 5000.0).abs() < 200.0);
    }

    #[test]
    fn line_init_examples() {
        let g = Graph::empty(2)
            .with_coords(vec![(0.1, 0.5), (0.9, 0.5)])
            .unwrap();
        let p = init_line_at(&g, 0.0).unwrap();
        assert_eq!(p.sides(), &[Side::Left, Side::Right]);

        let g = crate::gen::gen_geometric(101, 0.2, 3);
        for k in 0..10 {
            let p = init_line(&g, &mut rng_from_seed(k)).unwrap();
            assert_eq!((p.size_left(), p.size_right()), (50, 51));
        }
        assert!(matches!(
            init_line(&Graph::empty(3), &mut rng_from_seed(0)),
            Err(Error::MissingCoords)
        ));
    }

    #[test]
    fn line_split_separates_blobs() {
        let mut rng = rng_from_seed(17);
        let mut pts = Vec::new();
        for blob_x in [0.0, 0.6] {
            for _ in 0..60 {
                pts.push((blob_x + 0.3 * rng.gen::<f64>(), 0.3 * rng.gen::<f64>()));
            }
        }
        let g = crate::gen::geometric_from_points(pts, 0.45);
        let inter_blob = g
            .edges()
            .iter()
            .filter(|&&(u, v)| (u < 60) != (v < 60))
            .count();
        assert!(inter_blob > 0);
        let p = init_line_at(&g, 0.0).unwrap();
        assert_eq!(p.cut(), inter_blob);
    }

    #[test]
    fn select_examples() {
        let mut rng = rng_from_seed(3);
        let st = DiffState::from_counts(&[3, 1, 0], &[0, 0, 0], vec![3, 1, 1]);
        assert_eq!(
            st.select(DiffMode::MaxDiff, TieBreak::Random, &mut rng)
                .unwrap(),
            0
        );
        assert_eq!(
            st.select(DiffMode::MinDiff, TieBreak::Random, &mut rng)
                .unwrap(),
            2
        );

        let st = DiffState::from_counts(&[2, 0, 0], &[0, 2, 0], vec![5, 7, 1]);
        for _ in 0..20 {
            let v = st
                .select(DiffMode::MaxDiff, TieBreak::MaxDegreeThenRandom, &mut rng)
                .unwrap();
            assert_eq!(v, 1);
        }

        // total tie: every vertex reachable
        let st = DiffState::new(&Graph::empty(4));
        let mut hit = [false; 4];
        for _ in 0..200 {
            hit[st
                .select(DiffMode::MaxDiff, TieBreak::Random, &mut rng)
                .unwrap()] = true;
        }
        assert!(hit.iter().all(|&h| h));

        let mut st = DiffState::new(&Graph::empty(1));
        st.place(&Graph::empty(1), 0, Side::Left);
        assert!(matches!(
            st.select(DiffMode::MinDiff, TieBreak::Random, &mut rng),
            Err(Error::NothingToSelect)
        ));
    }

    #[test]
    fn w_examples() {
        for seed in 0..10 {
            let mut rng = rng_from_seed(seed);
            let k3 = k(3);
            assert_eq!(
                construct_w(&k3, Objective::MaxCut, &mut rng).cut(),
                exhaustive_max_cut(&k3)
            );
            let c4 = cycle(4);
            assert_eq!(construct_w(&c4, Objective::MaxCut, &mut rng).cut(), 4);
            for obj in [Objective::MaxCut, Objective::MinQuotientCut] {
                let p = construct_w(&Graph::empty(5), obj, &mut rng);
                assert_eq!((p.len(), p.cut()), (5, 0));
            }
        }
    }

    #[test]
    fn w_quotient_keeps_both_sides() {
        let g = crate::gen::gen_geometric(300, 0.1, 2);
        let p = construct_w(&g, Objective::MinQuotientCut, &mut rng_from_seed(9));
        assert!(p.size_left().abs_diff(p.size_right()) <= 150);
        assert!(p.size_left() > 0 && p.size_right() > 0);
    }

    proptest! {
        #[test]
        fn max_cut_greedy_step_adds_the_larger_count(n in 1usize..60, d in 0.0f64..0.8, seed: u64) {
            let g = crate::gen::gen_random(n, d, seed);
            let mut rng = rng_from_seed(seed);
            let (p, trace) = construct(&g, DiffMode::MaxDiff, TieBreak::Random, &mut rng, |c, rng| {
                greedy_side(c, Objective::MaxCut, rng)
            });
            let mut total = 0;
            let mut seen = vec![false; n];
            for (c, s) in &trace {
                prop_assert_eq!(c.cut_added(*s), c.cut_if[0].max(c.cut_if[1]));
                prop_assert!(!std::mem::replace(&mut seen[c.vertex], true));
                total += c.cut_added(*s);
            }
            prop_assert_eq!(total, p.cut());
        }

        #[test]
        fn diff_state_matches_recount(n in 1usize..120, d in 0.0f64..0.5, seed: u64) {
            let g = crate::gen::gen_random(n, d, seed);
            let mut rng = rng_from_seed(seed);
            let mut st = DiffState::new(&g);
            let mut side: Vec<Option<Side>> = vec![None; n];
            for _ in 0..n {
                let v = st.select(DiffMode::MinDiff, TieBreak::Random, &mut rng).unwrap();
                let s = Side::from_bit(rng.gen());
                st.place(&g, v, s);
                side[v] = Some(s);
                let mut unplaced_edges = 0;
                for u in (0..n).filter(|&u| side[u].is_none()) {
                    let l = g.neighbors(u).iter().filter(|&&w| side[w] == Some(Side::Left)).count();
                    let r = g.neighbors(u).iter().filter(|&&w| side[w] == Some(Side::Right)).count();
                    prop_assert_eq!(st.counts(u), (l, r));
                    prop_assert_eq!(st.delta(u), l.abs_diff(r));
                    unplaced_edges += g.neighbors(u).iter().filter(|&&w| side[w].is_none()).count();
                }
                let unplaced = st.unplaced();
                let avg = if unplaced == 0 { 0.0 } else { unplaced_edges as f64 / unplaced as f64 };
                prop_assert!((st.unplaced_average_degree() - avg).abs() < 1e-12);
            }
        }
    }
}

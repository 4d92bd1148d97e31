//! Seeded generators for the experiment graph classes.
//!
//! All randomness comes from [`GenSpec::seed`]. Random and geometric graphs
//! draw from one stream; the unbalanced-regular generator gives each of its
//! three stages its own derived stream.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::partition::Side;
use crate::rng::{derived_rng, rng_from_seed, tag, Rng};

/// Restarts allowed for the stub-pairing samplers before giving up.
pub const PAIRING_RETRY_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphClass {
    Random { p: f64 },
    Geometric { d: f64 },
    Regular { r: usize },
    UnbalancedRandom { p1: f64, p2: f64 },
    UnbalancedRegular { k1: usize, k2: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub class: GraphClass,
    pub seed: u64,
}

impl GenSpec {
    pub fn kind_name(&self) -> &'static str {
        match self.class {
            GraphClass::Random { .. } => "random",
            GraphClass::Geometric { .. } => "geometric",
            GraphClass::Regular { .. } => "regular",
            GraphClass::UnbalancedRandom { .. } => "unbalanced-random",
            GraphClass::UnbalancedRegular { .. } => "unbalanced-regular",
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        GenSpec { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::Infeasible(format!("{name}={p} outside [0,1]")))
            }
        };
        if self.n == 0 {
            return Err(Error::Infeasible("n must be at least 1".into()));
        }
        match self.class {
            GraphClass::Random { p } => prob("p", p),
            GraphClass::Geometric { d } => {
                if d > 0.0 && d.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Infeasible(format!(
                        "distance threshold d={d} must be positive"
                    )))
                }
            }
            GraphClass::Regular { r } => check_regular(self.n, r),
            GraphClass::UnbalancedRandom { p1, p2 } => {
                if self.n < 2 {
                    return Err(Error::Infeasible("n must be at least 2".into()));
                }
                prob("p1", p1)?;
                prob("p2", p2)
            }
            GraphClass::UnbalancedRegular { k1, k2 } => check_unbalanced_regular(self.n, k1, k2),
        }
    }

    pub fn generate(&self) -> Result<Graph> {
        self.validate()?;
        match self.class {
            GraphClass::Random { p } => Ok(gen_random(self.n, p, self.seed)),
            GraphClass::Geometric { d } => Ok(gen_geometric(self.n, d, self.seed)),
            GraphClass::Regular { r } => gen_regular(self.n, r, self.seed),
            GraphClass::UnbalancedRandom { p1, p2 } => {
                Ok(gen_unbalanced_random(self.n, p1, p2, self.seed))
            }
            GraphClass::UnbalancedRegular { k1, k2 } => {
                gen_unbalanced_regular(self.n, k1, k2, self.seed)
            }
        }
    }

    /// Block labels of the planted bisection for the unbalanced classes:
    /// vertices `0..n/2` are LEFT, the rest RIGHT.
    pub fn planted(&self) -> Option<Vec<Side>> {
        match self.class {
            GraphClass::UnbalancedRandom { .. } | GraphClass::UnbalancedRegular { .. } => {
                let half = self.n / 2;
                Some(
                    (0..self.n)
                        .map(|v| if v < half { Side::Left } else { Side::Right })
                        .collect(),
                )
            }
            _ => None,
        }
    }
}

impl fmt::Display for GenSpec {
    /// `kind=... n=... <params> seed=...`, the body of a `# genspec` line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "kind={} n={}", self.kind_name(), self.n)?;
        match self.class {
            GraphClass::Random { p } => write!(f, " p={p}")?,
            GraphClass::Geometric { d } => write!(f, " d={d}")?,
            GraphClass::Regular { r } => write!(f, " r={r}")?,
            GraphClass::UnbalancedRandom { p1, p2 } => write!(f, " p1={p1} p2={p2}")?,
            GraphClass::UnbalancedRegular { k1, k2 } => write!(f, " k1={k1} k2={k2}")?,
        }
        write!(f, " seed={}", self.seed)
    }
}

impl FromStr for GenSpec {
    type Err = String;

    /// Accepts the `Display` form, optionally prefixed by `# genspec`.
    /// Geometric specs may give `deg=<average degree>` instead of `d`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let body = s.trim();
        let body = body.strip_prefix('#').map(str::trim_start).unwrap_or(body);
        let body = body.strip_prefix("genspec").unwrap_or(body);
        let mut fields = std::collections::BTreeMap::new();
        for tok in body.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{tok}`"))?;
            if fields.insert(k, v).is_some() {
                return Err(format!("repeated key `{k}`"));
            }
        }
        let mut take = |k: &str| fields.remove(k).ok_or_else(|| format!("missing `{k}`"));
        let kind = take("kind")?;
        let n: usize = take("n")?.parse().map_err(|e| format!("n: {e}"))?;
        let seed: u64 = take("seed")?.parse().map_err(|e| format!("seed: {e}"))?;
        fn num<T: FromStr>(k: &str, v: &str) -> std::result::Result<T, String>
        where
            T::Err: fmt::Display,
        {
            v.parse().map_err(|e| format!("{k}: {e}"))
        }
        let class = match kind {
            "random" => GraphClass::Random {
                p: num("p", take("p")?)?,
            },
            "geometric" => {
                let d = match (fields.remove("d"), fields.remove("deg")) {
                    (Some(d), None) => num("d", d)?,
                    (None, Some(deg)) => geometric_threshold_for_degree(n, num("deg", deg)?),
                    _ => return Err("geometric needs exactly one of `d`, `deg`".into()),
                };
                GraphClass::Geometric { d }
            }
            "regular" => GraphClass::Regular {
                r: num("r", take("r")?)?,
            },
            "unbalanced-random" => GraphClass::UnbalancedRandom {
                p1: num("p1", take("p1")?)?,
                p2: num("p2", take("p2")?)?,
            },
            "unbalanced-regular" => GraphClass::UnbalancedRegular {
                k1: num("k1", take("k1")?)?,
                k2: num("k2", take("k2")?)?,
            },
            other => return Err(format!("unknown kind `{other}`")),
        };
        if let Some(k) = fields.keys().next() {
            return Err(format!("unexpected key `{k}` for kind {kind}"));
        }
        let spec = GenSpec { n, class, seed };
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }
}

/// Erdős–Rényi `G(n, p)`: every unordered pair independently.
pub fn gen_random(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = rng_from_seed(seed);
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                g.push_edge_unchecked(u, v);
            }
        }
    }
    g
}

/// `n` uniform points in the unit square, joined when closer than `d`.
pub fn gen_geometric(n: usize, d: f64, seed: u64) -> Graph {
    let mut rng = rng_from_seed(seed);
    let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
    geometric_from_points(points, d)
}

/// Threshold graph on fixed points; edges `(u, v)` with `|pu - pv| < d`,
/// emitted in lexicographic order.
pub fn geometric_from_points(points: Vec<(f64, f64)>, d: f64) -> Graph {
    let n = points.len();
    // grid of cells at least d wide, so neighbors live in the 3x3 block
    let cells_per_side = ((1.0 / d).floor() as usize).clamp(1, 4096);
    let cell_of = |x: f64| ((x * cells_per_side as f64) as usize).min(cells_per_side - 1);
    let mut grid: Vec<Vec<Vertex>> = vec![Vec::new(); cells_per_side * cells_per_side];
    for (v, &(x, y)) in points.iter().enumerate() {
        grid[cell_of(y) * cells_per_side + cell_of(x)].push(v);
    }
    let d2 = d * d;
    let mut edges = Vec::new();
    for (u, &(x, y)) in points.iter().enumerate() {
        let (cx, cy) = (cell_of(x) as isize, cell_of(y) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (cx + dx, cy + dy);
                if nx < 0
                    || ny < 0
                    || nx >= cells_per_side as isize
                    || ny >= cells_per_side as isize
                {
                    continue;
                }
                for &v in &grid[ny as usize * cells_per_side + nx as usize] {
                    if v > u {
                        let (vx, vy) = points[v];
                        if (vx - x).powi(2) + (vy - y).powi(2) < d2 {
                            edges.push((u, v));
                        }
                    }
                }
            }
        }
    }
    edges.sort_unstable();
    let mut g = Graph::empty(n);
    for (u, v) in edges {
        g.push_edge_unchecked(u, v);
    }
    g.with_coords(points).expect("one coordinate per vertex")
}

/// Probability that two uniform points in the unit square are closer than
/// `d` (valid for `d <= 1`).
pub fn geometric_edge_probability(d: f64) -> f64 {
    let d = d.min(1.0);
    std::f64::consts::PI * d * d - 8.0 / 3.0 * d.powi(3) + 0.5 * d.powi(4)
}

/// Threshold whose expected average degree on `n` points is `deg`,
/// boundary effects included.
pub fn geometric_threshold_for_degree(n: usize, deg: f64) -> f64 {
    let target = deg / (n.saturating_sub(1).max(1)) as f64;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if geometric_edge_probability(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_regular(n: usize, r: usize) -> Result<()> {
    if r >= n && !(r == 0 && n > 0) {
        return Err(Error::Infeasible(format!(
            "degree {r} needs more than {n} vertices"
        )));
    }
    if !(n * r).is_multiple_of(2) {
        return Err(Error::Infeasible(format!("n*r = {} is odd", n * r)));
    }
    Ok(())
}

fn check_unbalanced_regular(n: usize, k1: usize, k2: usize) -> Result<()> {
    if !n.is_multiple_of(2) || n == 0 {
        return Err(Error::Infeasible(format!(
            "n={n} must be even and positive"
        )));
    }
    let half = n / 2;
    check_regular(half, k1)?;
    if k2 > half {
        return Err(Error::Infeasible(format!(
            "cross degree {k2} exceeds half size {half}"
        )));
    }
    Ok(())
}

/// Random `r`-regular graph from the configuration model.
pub fn gen_regular(n: usize, r: usize, seed: u64) -> Result<Graph> {
    check_regular(n, r)?;
    let mut rng = rng_from_seed(seed);
    let mut g = Graph::empty(n);
    for (u, v) in pair_within(&mut rng, &(0..n).collect::<Vec<_>>(), r)? {
        g.push_edge_unchecked(u, v);
    }
    Ok(g)
}

/// Planted bisection: pairs inside a block join with probability `p1`,
/// pairs across blocks with `p2`. Block A is `0..n/2`.
pub fn gen_unbalanced_random(n: usize, p1: f64, p2: f64, seed: u64) -> Graph {
    let mut rng = rng_from_seed(seed);
    let half = n / 2;
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            let p = if (u < half) == (v < half) { p1 } else { p2 };
            if rng.gen::<f64>() < p {
                g.push_edge_unchecked(u, v);
            }
        }
    }
    g
}

/// A `k1`-regular graph inside each half plus a `k2`-regular bipartite
/// graph between the halves; every vertex ends with degree `k1 + k2`.
pub fn gen_unbalanced_regular(n: usize, k1: usize, k2: usize, seed: u64) -> Result<Graph> {
    check_unbalanced_regular(n, k1, k2)?;
    let half = n / 2;
    let block_a: Vec<Vertex> = (0..half).collect();
    let block_b: Vec<Vertex> = (half..n).collect();
    let mut g = Graph::empty(n);
    let mut rng = derived_rng(seed, tag::GEN_STAGE, 0);
    for (u, v) in pair_within(&mut rng, &block_a, k1)? {
        g.push_edge_unchecked(u, v);
    }
    let mut rng = derived_rng(seed, tag::GEN_STAGE, 1);
    for (u, v) in pair_within(&mut rng, &block_b, k1)? {
        g.push_edge_unchecked(u, v);
    }
    let mut rng = derived_rng(seed, tag::GEN_STAGE, 2);
    for (u, v) in pair_across(&mut rng, &block_a, &block_b, k2)? {
        g.push_edge_unchecked(u, v);
    }
    Ok(g)
}

/// Consecutive failed draws before checking whether any legal pair is left.
const STUCK_DRAWS: usize = 64;

/// Simple `degree`-regular pairing over `vertices`.
///
/// Stubs are paired one at a time; a draw that would create a loop or a
/// repeated edge is redrawn, and the whole sample restarts only when no
/// legal pair remains.
fn pair_within(rng: &mut Rng, vertices: &[Vertex], degree: usize) -> Result<Vec<(Vertex, Vertex)>> {
    for _ in 0..PAIRING_RETRY_CAP {
        if let Some(edges) = try_pair(rng, vertices, None, degree) {
            return Ok(edges);
        }
    }
    Err(Error::RetryCapExceeded(PAIRING_RETRY_CAP))
}

/// Simple `degree`-biregular bipartite pairing between two equal blocks.
fn pair_across(
    rng: &mut Rng,
    a: &[Vertex],
    b: &[Vertex],
    degree: usize,
) -> Result<Vec<(Vertex, Vertex)>> {
    for _ in 0..PAIRING_RETRY_CAP {
        if let Some(edges) = try_pair(rng, a, Some(b), degree) {
            return Ok(edges);
        }
    }
    Err(Error::RetryCapExceeded(PAIRING_RETRY_CAP))
}

fn try_pair(
    rng: &mut Rng,
    a: &[Vertex],
    b: Option<&[Vertex]>,
    degree: usize,
) -> Option<Vec<(Vertex, Vertex)>> {
    let mut stubs = |vs: &[Vertex]| -> Vec<Vertex> {
        let mut s: Vec<Vertex> = vs
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, degree))
            .collect();
        s.shuffle(rng);
        s
    };
    let mut left = stubs(a);
    let mut right = b.map(stubs);
    let mut adj: std::collections::HashMap<Vertex, Vec<Vertex>> = Default::default();
    let linked = |adj: &std::collections::HashMap<Vertex, Vec<Vertex>>, u: Vertex, v: Vertex| {
        adj.get(&u).is_some_and(|l| l.contains(&v))
    };
    let mut edges = Vec::with_capacity(a.len() * degree / if b.is_some() { 1 } else { 2 });
    let mut failures = 0;

    loop {
        let remaining = match &right {
            Some(r) => r.len(),
            None => left.len(),
        };
        if remaining == 0 {
            return Some(edges);
        }
        // indices of the pair to join: (i in left, j in right-or-left)
        let (i, j) = if failures < STUCK_DRAWS {
            match &right {
                Some(r) => (rng.gen_range(0..left.len()), rng.gen_range(0..r.len())),
                None => {
                    let i = rng.gen_range(0..left.len());
                    let mut j = rng.gen_range(0..left.len() - 1);
                    if j >= i {
                        j += 1;
                    }
                    (i, j)
                }
            }
        } else {
            // enumerate legal pairs; none left means this sample is dead
            let other = right.as_deref().unwrap_or(&left);
            let mut legal = Vec::new();
            for (i, &u) in left.iter().enumerate() {
                let start = if right.is_some() { 0 } else { i + 1 };
                for (j, &v) in other.iter().enumerate().skip(start) {
                    if u != v && !linked(&adj, u, v) {
                        legal.push((i, j));
                    }
                }
            }
            if legal.is_empty() {
                return None;
            }
            failures = 0;
            legal[rng.gen_range(0..legal.len())]
        };
        let u = left[i];
        let v = match &right {
            Some(r) => r[j],
            None => left[j],
        };
        if u == v || linked(&adj, u, v) {
            failures += 1;
            continue;
        }
        failures = 0;
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
        edges.push((u, v));
        match &mut right {
            Some(r) => {
                left.swap_remove(i);
                r.swap_remove(j);
            }
            None => {
                let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                left.swap_remove(hi);
                left.swap_remove(lo);
            }
        }
    }
}

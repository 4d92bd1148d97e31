//! Two-way partitionings and the cut arithmetic every algorithm shares.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Side {
    Left = 0,
    Right = 1,
}

impl Side {
    #[inline]
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_bit(bit: bool) -> Side {
        if bit {
            Side::Right
        } else {
            Side::Left
        }
    }
}

/// The problem being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    MaxCut,
    MinQuotientCut,
}

impl Objective {
    pub fn is_maximization(self) -> bool {
        matches!(self, Objective::MaxCut)
    }

    pub fn name(self) -> &'static str {
        match self {
            Objective::MaxCut => "maxcut",
            Objective::MinQuotientCut => "quotient",
        }
    }

    /// Scalar score: cut count for max-cut, quotient cost otherwise
    /// (`+inf` when a side is empty).
    pub fn score(self, q: Quality) -> f64 {
        match self {
            Objective::MaxCut => q.cut as f64,
            Objective::MinQuotientCut => q.quotient().unwrap_or(f64::INFINITY),
        }
    }

    /// `Greater` means `a` is strictly better than `b`.
    ///
    /// Quotients are compared exactly by cross-multiplication; a partitioning
    /// with an empty side is worse than any proper one and ties with other
    /// degenerate ones.
    pub fn compare(self, a: Quality, b: Quality) -> Ordering {
        match self {
            Objective::MaxCut => a.cut.cmp(&b.cut),
            Objective::MinQuotientCut => {
                let (da, db) = (a.min_side(), b.min_side());
                match (da, db) {
                    (0, 0) => Ordering::Equal,
                    (0, _) => Ordering::Less,
                    (_, 0) => Ordering::Greater,
                    _ => {
                        let lhs = a.cut as u128 * db as u128;
                        let rhs = b.cut as u128 * da as u128;
                        rhs.cmp(&lhs)
                    }
                }
            }
        }
    }

    pub fn better(self, a: Quality, b: Quality) -> bool {
        self.compare(a, b) == Ordering::Greater
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "maxcut" | "max_cut" | "max-cut" => Ok(Objective::MaxCut),
            "quotient" | "min_quotient_cut" | "min-quotient-cut" => Ok(Objective::MinQuotientCut),
            other => Err(format!("unknown objective `{other}` (maxcut|quotient)")),
        }
    }
}

/// Everything the objectives need from a partitioning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quality {
    pub cut: usize,
    pub left: usize,
    pub right: usize,
}

impl Quality {
    pub fn min_side(&self) -> usize {
        self.left.min(self.right)
    }

    pub fn quotient(&self) -> Option<f64> {
        match self.min_side() {
            0 => None,
            d => Some(self.cut as f64 / d as f64),
        }
    }
}

/// A two-way vertex assignment with cached side sizes and cut count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partitioning {
    side: Vec<Side>,
    size: [usize; 2],
    cut: usize,
}

impl Partitioning {
    pub fn new(g: &Graph, side: Vec<Side>) -> Result<Self> {
        if side.len() != g.n() {
            return Err(Error::SizeMismatch {
                expected: g.n(),
                got: side.len(),
            });
        }
        let mut size = [0usize; 2];
        for s in &side {
            size[s.index()] += 1;
        }
        let cut = recount_cut(g, &side);
        Ok(Partitioning { side, size, cut })
    }

    pub fn all_left(g: &Graph) -> Self {
        Partitioning {
            side: vec![Side::Left; g.n()],
            size: [g.n(), 0],
            cut: 0,
        }
    }

    /// Vertices in `left` go LEFT, the rest RIGHT.
    pub fn from_left_set(g: &Graph, left: &[Vertex]) -> Result<Self> {
        let mut side = vec![Side::Right; g.n()];
        for &v in left {
            if v >= g.n() {
                return Err(Error::VertexOutOfRange(v));
            }
            side[v] = Side::Left;
        }
        Partitioning::new(g, side)
    }

    #[inline]
    pub fn side(&self, v: Vertex) -> Side {
        self.side[v]
    }

    pub fn sides(&self) -> &[Side] {
        &self.side
    }

    pub fn len(&self) -> usize {
        self.side.len()
    }

    pub fn is_empty(&self) -> bool {
        self.side.is_empty()
    }

    pub fn size(&self, s: Side) -> usize {
        self.size[s.index()]
    }

    pub fn size_left(&self) -> usize {
        self.size[0]
    }

    pub fn size_right(&self) -> usize {
        self.size[1]
    }

    #[inline]
    pub fn cut(&self) -> usize {
        self.cut
    }

    pub fn quality(&self) -> Quality {
        Quality {
            cut: self.cut,
            left: self.size[0],
            right: self.size[1],
        }
    }

    pub fn score(&self, objective: Objective) -> f64 {
        objective.score(self.quality())
    }

    /// Moves `v` to the other side, updating caches in `O(deg v)`.
    pub fn flip(&mut self, g: &Graph, v: Vertex) {
        let delta = gain_unchecked(g, self, v);
        self.cut = (self.cut as i64 + delta) as usize;
        let s = self.side[v];
        self.size[s.index()] -= 1;
        self.size[s.other().index()] += 1;
        self.side[v] = s.other();
    }

    pub(crate) fn debug_check(&self, g: &Graph) {
        debug_assert_eq!(self.cut, recount_cut(g, &self.side), "stale cut cache");
        debug_assert_eq!(self.size[0] + self.size[1], self.side.len());
    }
}

fn recount_cut(g: &Graph, side: &[Side]) -> usize {
    g.edges()
        .iter()
        .filter(|&&(u, v)| side[u] != side[v])
        .count()
}

fn check_sizes(g: &Graph, p: &Partitioning) -> Result<()> {
    if p.len() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            got: p.len(),
        });
    }
    Ok(())
}

/// Number of edges whose endpoints lie on different sides, counted from
/// scratch over the edge list.
pub fn cut_count(g: &Graph, p: &Partitioning) -> Result<usize> {
    check_sizes(g, p)?;
    Ok(recount_cut(g, p.sides()))
}

/// `cut / min(|LEFT|, |RIGHT|)`.
pub fn quotient_cost(g: &Graph, p: &Partitioning) -> Result<f64> {
    check_sizes(g, p)?;
    let q = Quality {
        cut: recount_cut(g, p.sides()),
        left: p.size_left(),
        right: p.size_right(),
    };
    q.quotient().ok_or(Error::EmptySide)
}

/// Same-side and opposite-side neighbor counts of `v`.
pub fn critical_counts(g: &Graph, p: &Partitioning, v: Vertex) -> Result<(usize, usize)> {
    check_sizes(g, p)?;
    if v >= g.n() {
        return Err(Error::VertexOutOfRange(v));
    }
    Ok(critical_counts_unchecked(g, p, v))
}

#[inline]
pub(crate) fn critical_counts_unchecked(g: &Graph, p: &Partitioning, v: Vertex) -> (usize, usize) {
    let s = p.side(v);
    let same = g.neighbors(v).iter().filter(|&&w| p.side(w) == s).count();
    (same, g.degree(v) - same)
}

/// Cell gain: same-side minus opposite-side neighbors, i.e. the change in
/// cut count if `v` alone switches sides.
pub fn gain(g: &Graph, p: &Partitioning, v: Vertex) -> Result<i64> {
    let (same, opp) = critical_counts(g, p, v)?;
    Ok(same as i64 - opp as i64)
}

#[inline]
pub(crate) fn gain_unchecked(g: &Graph, p: &Partitioning, v: Vertex) -> i64 {
    let (same, opp) = critical_counts_unchecked(g, p, v);
    same as i64 - opp as i64
}

/// Toggles the side of every vertex in `vs`.
pub fn apply_flip_flop(g: &Graph, p: &mut Partitioning, vs: &[Vertex]) -> Result<()> {
    check_sizes(g, p)?;
    let mut seen = vec![false; g.n()];
    for &v in vs {
        if v >= g.n() {
            return Err(Error::VertexOutOfRange(v));
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::DuplicateVertex(v));
        }
    }
    for &v in vs {
        p.flip(g, v);
    }
    p.debug_check(g);
    Ok(())
}

//! Undirected simple graphs.

use crate::error::{Error, Result};

pub type Vertex = usize;

/// An undirected simple graph.
///
/// Edges are kept twice: as a flat `(u, v)` list with `u < v`, used by
/// recount oracles and serialization, and as adjacency lists for inner loops.
/// Adjacency order follows edge insertion order, which makes "first
/// candidate in adjacency order" scans reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: Vec<Vec<Vertex>>,
    edges: Vec<(Vertex, Vertex)>,
    coords: Option<Vec<(f64, f64)>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); n],
            edges: Vec::new(),
            coords: None,
        }
    }

    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn with_coords(mut self, coords: Vec<(f64, f64)>) -> Result<Self> {
        if coords.len() != self.n() {
            return Err(Error::InvalidGraph(format!(
                "{} coordinates for {} vertices",
                coords.len(),
                self.n()
            )));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<()> {
        let n = self.n();
        if u >= n {
            return Err(Error::VertexOutOfRange(u));
        }
        if v >= n {
            return Err(Error::VertexOutOfRange(v));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("self-loop at {u}")));
        }
        if self.has_edge(u, v) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({u},{v})")));
        }
        self.push_edge_unchecked(u, v);
        Ok(())
    }

    /// Caller guarantees the edge is new and not a loop.
    pub(crate) fn push_edge_unchecked(&mut self, u: Vertex, v: Vertex) {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges.push((a, b));
        self.adjacency[u].push(v);
        self.adjacency[v].push(u);
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn average_degree(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            2.0 * self.m() as f64 / self.n() as f64
        }
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        // scan the shorter list
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[a].contains(&b)
    }

    /// Checks the structural invariants: no loops or duplicates, symmetric
    /// adjacency, adjacency lengths summing to `2m`.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        let mut seen = std::collections::HashSet::with_capacity(self.m());
        for &(u, v) in &self.edges {
            if u >= v || v >= n {
                return Err(Error::InvalidGraph(format!("bad edge ({u},{v})")));
            }
            if !seen.insert((u, v)) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u},{v})")));
            }
        }
        let total: usize = self.adjacency.iter().map(Vec::len).sum();
        if total != 2 * self.m() {
            return Err(Error::InvalidGraph(format!(
                "adjacency lengths sum to {total}, expected {}",
                2 * self.m()
            )));
        }
        for (u, list) in self.adjacency.iter().enumerate() {
            for &v in list {
                let key = if u < v { (u, v) } else { (v, u) };
                if !seen.contains(&key) {
                    return Err(Error::InvalidGraph(format!(
                        "adjacency entry {u}->{v} has no edge"
                    )));
                }
            }
        }
        Ok(())
    }
}

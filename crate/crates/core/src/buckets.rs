//! Fiduccia–Mattheyses style gain buckets.

use crate::graph::Vertex;

const NIL: usize = usize::MAX;

/// Vertices bucketed by an integer key in `[-max_key, max_key]`.
///
/// Each bucket is an intrusive doubly-linked list threaded through per-vertex
/// `next`/`prev` arrays, so insert, remove and re-key are `O(1)`. New
/// entries go to the front of their bucket: within a bucket the most recently
/// inserted vertex comes out first.
#[derive(Debug, Clone)]
pub struct GainBuckets {
    max_key: i64,
    heads: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
    key: Vec<i64>,
    present: Vec<bool>,
    len: usize,
    // lazy bounds: no nonempty bucket above `hi` or below `lo`
    hi: usize,
    lo: usize,
}

impl GainBuckets {
    pub fn new(n: usize, max_key: usize) -> Self {
        let width = 2 * max_key + 1;
        GainBuckets {
            max_key: max_key as i64,
            heads: vec![NIL; width],
            next: vec![NIL; n],
            prev: vec![NIL; n],
            key: vec![0; n],
            present: vec![false; n],
            len: 0,
            hi: 0,
            lo: width - 1,
        }
    }

    #[inline]
    fn slot(&self, key: i64) -> usize {
        debug_assert!(key.abs() <= self.max_key, "key {key} out of range");
        (key + self.max_key) as usize
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.present[v]
    }

    pub fn key(&self, v: Vertex) -> Option<i64> {
        self.present[v].then(|| self.key[v])
    }

    pub fn insert(&mut self, v: Vertex, key: i64) {
        debug_assert!(!self.present[v]);
        let s = self.slot(key);
        let head = self.heads[s];
        self.next[v] = head;
        self.prev[v] = NIL;
        if head != NIL {
            self.prev[head] = v;
        }
        self.heads[s] = v;
        self.key[v] = key;
        self.present[v] = true;
        self.len += 1;
        self.hi = self.hi.max(s);
        self.lo = self.lo.min(s);
    }

    pub fn remove(&mut self, v: Vertex) {
        debug_assert!(self.present[v]);
        let (p, nx) = (self.prev[v], self.next[v]);
        if p != NIL {
            self.next[p] = nx;
        } else {
            let s = self.slot(self.key[v]);
            self.heads[s] = nx;
        }
        if nx != NIL {
            self.prev[nx] = p;
        }
        self.present[v] = false;
        self.len -= 1;
    }

    pub fn update(&mut self, v: Vertex, key: i64) {
        if self.present[v] {
            self.remove(v);
            self.insert(v, key);
        }
    }

    /// Highest key present, with the front vertex of that bucket.
    pub fn max(&mut self) -> Option<(i64, Vertex)> {
        if self.len == 0 {
            return None;
        }
        while self.heads[self.hi] == NIL {
            self.hi -= 1;
        }
        Some((self.hi as i64 - self.max_key, self.heads[self.hi]))
    }

    /// Lowest key present, with the front vertex of that bucket.
    pub fn min(&mut self) -> Option<(i64, Vertex)> {
        if self.len == 0 {
            return None;
        }
        while self.heads[self.lo] == NIL {
            self.lo += 1;
        }
        Some((self.lo as i64 - self.max_key, self.heads[self.lo]))
    }

    /// Members of the bucket for `key`, front first.
    pub fn bucket(&self, key: i64) -> BucketIter<'_> {
        let head = if key.abs() <= self.max_key {
            self.heads[self.slot(key)]
        } else {
            NIL
        };
        BucketIter {
            buckets: self,
            at: head,
        }
    }

    /// Nonempty keys from highest to lowest (or the reverse).
    pub fn keys(&mut self, descending: bool) -> Vec<i64> {
        if self.len == 0 {
            return Vec::new();
        }
        let (lo, hi) = (self.min().unwrap().0, self.max().unwrap().0);
        let mut keys: Vec<i64> = (lo..=hi)
            .filter(|&k| self.heads[self.slot(k)] != NIL)
            .collect();
        if descending {
            keys.reverse();
        }
        keys
    }
}

pub struct BucketIter<'a> {
    buckets: &'a GainBuckets,
    at: usize,
}

impl Iterator for BucketIter<'_> {
    type Item = Vertex;

    fn next(&mut self) -> Option<Vertex> {
        if self.at == NIL {
            return None;
        }
        let v = self.at;
        self.at = self.buckets.next[v];
        Some(v)
    }
}

use std::time::{Duration, Instant};

/// How long an optimizer may run: a wall-clock limit on its main loop, a
/// cap on the number of starting partitionings, or both (whichever is hit
/// first). With neither set, a single start is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Budget {
    pub time: Option<Duration>,
    pub restarts: Option<usize>,
}

impl Budget {
    pub fn time(d: Duration) -> Self {
        Budget {
            time: Some(d),
            restarts: None,
        }
    }

    pub fn seconds(s: f64) -> Self {
        Budget::time(Duration::from_secs_f64(s.max(0.0)))
    }

    pub fn restarts(n: usize) -> Self {
        Budget {
            time: None,
            restarts: Some(n),
        }
    }

    pub fn with_restarts(mut self, n: usize) -> Self {
        self.restarts = Some(n);
        self
    }

    pub fn max_starts(&self) -> usize {
        match (self.time, self.restarts) {
            (_, Some(n)) => n,
            (Some(_), None) => usize::MAX,
            (None, None) => 1,
        }
    }

    pub fn start(self) -> Clock {
        Clock {
            started: Instant::now(),
            limit: self.time,
            max_starts: self.max_starts(),
        }
    }
}

/// A running budget.
#[derive(Debug, Clone, Copy)]
pub struct Clock {
    started: Instant,
    limit: Option<Duration>,
    max_starts: usize,
}

impl Clock {
    pub fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }

    pub fn expired(&self) -> bool {
        self.limit.is_some_and(|l| self.started.elapsed() >= l)
    }

    pub fn remaining(&self) -> Option<Duration> {
        self.limit.map(|l| l.saturating_sub(self.started.elapsed()))
    }

    pub fn limit(&self) -> Option<Duration> {
        self.limit
    }

    /// Whether start number `started` (0-based) may begin.
    pub fn may_start(&self, started: usize) -> bool {
        started < self.max_starts && !self.expired()
    }
}

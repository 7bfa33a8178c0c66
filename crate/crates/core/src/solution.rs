//! Integration output: global-node records, error trace and run statistics.

use crate::vector::StateVector;

/// Counters tallied over one integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStatistics {
    /// Accepted local steps, startup steps included.
    pub local_steps: u64,
    /// Steps after which `h` was halved and integration continued.
    pub halvings: u64,
    pub doublings: u64,
    /// Steps rejected for excessive error and repeated at half the step size.
    pub restarts: u64,
    /// Times the two-step history was discarded and rebuilt with a startup
    /// step because a global-node re-grid could not interpolate.
    pub history_resets: u64,
}

/// A reported solution at a global node.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalRecord {
    pub t: f64,
    pub x: StateVector,
    /// Solved velocity; only present for the dynamic family.
    pub v: Option<StateVector>,
}

/// Error estimate and step size of one accepted local step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub t: f64,
    pub eps: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSeries {
    pub records: Vec<GlobalRecord>,
    pub stats: RunStatistics,
    pub trace: Vec<TraceEntry>,
}

impl SolutionSeries {
    pub fn last(&self) -> &GlobalRecord {
        self.records.last().expect("solution series is never empty")
    }

    /// Largest error estimate over all accepted steps.
    pub fn max_eps(&self) -> f64 {
        self.trace.iter().map(|e| e.eps).fold(0.0, f64::max)
    }
}

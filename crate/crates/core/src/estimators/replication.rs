//! Deterministic replication engine.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::{StreamKey, StreamRng};
use crate::{Error, Result};

/// What to replicate: a seed, a replicate count per grid point and the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationPlan {
    pub master_seed: u64,
    pub replicate_count: usize,
    pub parameter_grid: Vec<f64>,
    pub functional_kind: String,
    pub dim: usize,
    /// RNG stream purpose (see [`crate::rng::purpose`]).
    pub purpose: u8,
}

/// One replicate's outcome; failures (for example `OriginNotInterior`) are
/// recorded rather than aborting the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow<T> {
    pub grid_index: usize,
    pub grid_value: f64,
    pub replicate: usize,
    pub outcome: std::result::Result<T, Error>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationTable<T> {
    pub plan: ReplicationPlan,
    /// Rows ordered by `(grid_index, replicate)`.
    pub rows: Vec<ReplicateRow<T>>,
}

impl<T> ReplicationTable<T> {
    /// Successful outcomes at one grid point, in replicate order.
    pub fn successes(&self, grid_index: usize) -> Vec<&T> {
        self.rows.iter().filter(|r| r.grid_index == grid_index).filter_map(|r| r.outcome.as_ref().ok()).collect()
    }

    pub fn failures(&self, grid_index: usize) -> usize {
        self.rows.iter().filter(|r| r.grid_index == grid_index && r.outcome.is_err()).count()
    }
}

/// Runs `f(grid_value, rng)` for every `(grid point, replicate)` with the
/// replicate's own stream. Rows are produced in index order whatever the
/// scheduling, so the table is a pure function of the plan.
pub fn run_replications<T, F>(plan: &ReplicationPlan, f: F) -> ReplicationTable<T>
where
    T: Send,
    F: Fn(usize, f64, &mut StreamRng) -> Result<T> + Sync,
{
    let jobs: Vec<(usize, usize)> = (0..plan.parameter_grid.len())
        .flat_map(|g| (0..plan.replicate_count).map(move |r| (g, r)))
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(g, r)| {
            let mut rng = StreamKey::new(plan.master_seed, plan.purpose, g as u32, r as u64).rng();
            let grid_value = plan.parameter_grid[g];
            ReplicateRow { grid_index: g, grid_value, replicate: r, outcome: f(g, grid_value, &mut rng) }
        })
        .collect();
    ReplicationTable { plan: plan.clone(), rows }
}

/// Runs `op` on a dedicated pool with `workers` threads (`0` = rayon's
/// default). Output never depends on the worker count.
pub fn with_workers<R: Send>(workers: usize, op: impl FnOnce() -> R + Send) -> R {
    if workers == 0 {
        return op();
    }
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool").install(op)
}

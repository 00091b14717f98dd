//! Multi-threaded sweep driver. Results do not depend on the worker count.

use rayon::prelude::*;
use wlpkit_core::sweep::{Objective, SweepPlan, SweepTable};
use wlpkit_core::{Error, Result};

/// Evaluate every cell of `plan` on `workers` threads.
pub fn run<O: Objective + ?Sized>(plan: &SweepPlan, objective: &O, workers: usize) -> Result<SweepTable> {
    if workers <= 1 {
        return plan.run(objective);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    let cells = pool.install(|| {
        (0..plan.len())
            .into_par_iter()
            .map(|i| plan.cell(i, objective))
            .collect::<Result<Vec<_>>>()
    })?;
    plan.collect(cells)
}

//! Independent replications run in parallel and merged in replication order.

use blackspace_core::model::ScenarioParams;
use blackspace_core::rng::derive_seed;
use blackspace_core::sim::{run_simulation_with, SimOptions, SimReport};
use rayon::prelude::*;

use crate::Result;

/// Runs `reps` replications with seeds derived from `opts.seed`.
///
/// Each replication depends only on its own seed and results are merged by
/// index, so the output does not depend on the thread count.
pub fn run_replications(scn: &ScenarioParams, opts: &SimOptions, reps: u32) -> Result<SimReport> {
    let reps = reps.max(1);
    let reports = (0..reps)
        .into_par_iter()
        .map(|i| {
            let opts = SimOptions {
                seed: derive_seed(opts.seed, u64::from(i)),
                ..opts.clone()
            };
            run_simulation_with(scn, &opts, None)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut merged = SimReport::merge(&reports)?;
    merged.seed = opts.seed;
    Ok(merged)
}

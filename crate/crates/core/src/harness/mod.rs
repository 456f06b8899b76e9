//! Experiment orchestration: multi-seed runs, sweeps, bound reports and CSV
//! output.
//!
//! Every run owns its model, environment and random streams, so seeds are
//! scheduled independently. Results are always returned in job order (seed
//! order for plain runs), whichever scheduling is used.

mod agent;
mod bandit;
mod bound;
mod config;
mod gradcheck;
mod output;
mod sweep;

pub use agent::{run_agent, AgentRecord, AgentSpec};
pub use bandit::{default_checkpoints, run_bandit, BanditRecord, BanditRun, BanditSpec, RegretPoint};
pub use bound::{nearest_rank, report_bound, BoundRow};
pub use config::{
    AdversaryKind, Algorithm, ExperimentConfig, ExperimentKind, CARTPOLE_LEARNING_RATE, CATCH_LEARNING_RATE,
    DESK_SEEDS, DESK_STEPS, PAPER_SEEDS, PAPER_STEPS,
};
pub use gradcheck::{gradcheck, GradcheckReport, LINEAR_TOLERANCE, MLP_TOLERANCE};
pub use output::{write_agent_csv, write_bandit_csv, write_bound_csv, write_sweep_csv};
pub use sweep::{run_sweep, SweepArm, SweepCell, SweepRow, SweepTable};

use rayon::prelude::*;

use crate::error::Result;

/// Map `f` over `jobs`, in parallel or not; output order follows `jobs`.
pub fn map_seeds<J, T, F>(jobs: &[J], parallel: bool, f: F) -> Result<Vec<T>>
where
    J: Sync,
    T: Send,
    F: Fn(&J) -> Result<T> + Sync + Send,
{
    if parallel {
        jobs.par_iter().map(&f).collect()
    } else {
        jobs.iter().map(f).collect()
    }
}

fn sorted_seeds(seeds: &[u64]) -> Vec<u64> {
    let mut s = seeds.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// All seeds of an agent config, records concatenated in seed order.
pub fn run_agent_seeds(config: &ExperimentConfig) -> Result<Vec<AgentRecord>> {
    config.validate()?;
    let spec = AgentSpec::from_config(config);
    let runs = map_seeds(&sorted_seeds(&config.seeds), config.parallel, |&seed| run_agent(&spec, seed))?;
    Ok(runs.into_iter().flatten().collect())
}

/// All seeds of a bandit config, in seed order.
pub fn run_bandit_seeds(config: &ExperimentConfig) -> Result<Vec<BanditRun>> {
    config.validate()?;
    map_seeds(&sorted_seeds(&config.seeds), config.parallel, |&seed| {
        run_bandit(&BanditSpec::from_config(config, seed)?, seed)
    })
}

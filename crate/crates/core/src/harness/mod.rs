//! The toy benchmark and the seeded experiment runner.
//!
//! Every random draw in a run flows from one 64-bit seed: replication `r`
//! of a batch uses `derive_seed(master, r)`, and arm `i` of that run draws
//! from a Xoshiro256++ stream seeded with `derive_seed(run_seed, i)`.

mod csv;
mod problem;
mod runner;
mod timing;

pub use self::csv::{
    write_profile_csv, write_runs_csv, write_sweep_csv, PROFILE_HEADER, RUNS_HEADER, SWEEP_HEADER,
};
pub use problem::{toy_arms, toy_function, Problem, ToySpec};
pub use runner::{
    run_on_arms, run_once, runtime_model, sweep, verify_pac, Algorithm, PacSummary, RunConfig,
    RunReport, SweepGrid, SweepRow,
};
pub use timing::{clock_overhead_nanos, TimedArm};

use thiserror::Error;

use crate::bandit::BanditError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Bandit(#[from] BanditError),
}

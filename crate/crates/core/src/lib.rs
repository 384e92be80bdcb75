//! PAC best-arm identification in relative precision for bandits whose
//! arms are expensive to sample.
//!
//! The building blocks, bottom up:
//!
//! * [`concentration`]: running statistics, the confidence schedule and the
//!   empirical-Bernstein half-width.
//! * [`estimator`]: adaptive-stopping mean estimation with relative
//!   precision, and the matching stopping-time bound.
//! * [`bandit`]: the selectors.
//! * [`harness`]: the toy benchmark, seeded replications, sweeps and CSV.
//! * [`cli`]: the `relpac` command line.

pub mod arms;
pub mod bandit;
pub mod cli;
pub mod concentration;
pub mod estimator;
pub mod harness;

pub use arms::{ArmDistribution, ArmOracle, ArmSpec, SeededArm};
pub use bandit::{ArmSet, SelectionConfig, SelectionResult};
pub use concentration::{Range, RunningStats, Schedule};
pub use estimator::{estimate_mean, Estimate};

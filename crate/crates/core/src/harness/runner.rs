use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use super::{clock_overhead_nanos, HarnessError, Problem, TimedArm};
use crate::arms::{derive_seed, ArmOracle};
use crate::bandit::{
    adaptive_maximize, median_elimination, nonadaptive_maximize, ucbv_maximize, ArmSet,
    BanditError, SelectionConfig, SelectionResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    NonAdaptive,
    Adaptive,
    UcbV,
    MedianElimination,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::MedianElimination,
        Algorithm::NonAdaptive,
        Algorithm::Adaptive,
        Algorithm::UcbV,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Self::NonAdaptive => "nonadaptive",
            Self::Adaptive => "adaptive",
            Self::UcbV => "ucbv",
            Self::MedianElimination => "me",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nonadaptive" | "alg1" => Ok(Self::NonAdaptive),
            "adaptive" | "alg2" => Ok(Self::Adaptive),
            "ucbv" | "ucb-v" => Ok(Self::UcbV),
            "me" | "median-elimination" => Ok(Self::MedianElimination),
            other => Err(HarnessError::Config(format!(
                "unknown algorithm '{other}' (expected nonadaptive, adaptive, ucbv or me)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub selection: SelectionConfig,
    /// Measure the non-sampling time of each run.
    pub measure_time: bool,
}

impl RunConfig {
    pub fn new(tau: f64, lambda: f64) -> Self {
        Self {
            selection: SelectionConfig::new(tau, lambda),
            measure_time: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub tau: f64,
    pub lambda: f64,
    pub p: f64,
    pub chosen_index: Option<usize>,
    pub chosen_xi: Option<f64>,
    pub total_samples: u64,
    pub per_arm_counts: Vec<u64>,
    /// Seconds spent outside the samplers.
    pub wall_other: f64,
    pub success: bool,
    pub iterations: u64,
    pub error: Option<BanditError>,
    pub selection: Option<SelectionResult>,
}

/// Runs `algorithm` once on `problem` with arm streams derived from `seed`.
///
/// Median Elimination is given the absolute precision
/// `tau * |best true mean|` and confidence `lambda`.
pub fn run_once(
    algorithm: Algorithm,
    problem: &Problem,
    config: &RunConfig,
    seed: u64,
) -> RunReport {
    run_on_arms(algorithm, problem, problem.instantiate(seed), config, seed)
}

/// As [`run_once`], but drawing from caller-supplied arms. `arms[i]` stands
/// in for arm `i` of `problem`, whose true means decide success; `seed` is
/// only recorded.
pub fn run_on_arms<A: ArmOracle>(
    algorithm: Algorithm,
    problem: &Problem,
    arms: Vec<A>,
    config: &RunConfig,
    seed: u64,
) -> RunReport {
    assert_eq!(arms.len(), problem.len(), "one arm per problem arm");
    let sel = config.selection;
    let arms: Vec<_> = arms
        .into_iter()
        .map(|a| TimedArm::new(a, config.measure_time))
        .collect();
    let mut set = ArmSet::new(arms).expect("problem is non-empty");

    if config.measure_time {
        // Calibrate the clock outside the measured section.
        clock_overhead_nanos();
    }
    let start = Instant::now();
    let outcome = match algorithm {
        Algorithm::NonAdaptive => nonadaptive_maximize(&mut set, &sel),
        Algorithm::Adaptive => adaptive_maximize(&mut set, &sel),
        Algorithm::UcbV => ucbv_maximize(&mut set, &sel),
        Algorithm::MedianElimination => {
            let eps_abs = sel.tau * problem.best_mean().abs();
            match crate::bandit::check_unit("tau", sel.tau) {
                Ok(()) => median_elimination(&mut set, eps_abs, sel.lambda, sel.cap),
                Err(e) => Err(e),
            }
        }
    };
    let elapsed = start.elapsed().as_secs_f64();

    let wall_other = if config.measure_time {
        let sampler: f64 = set
            .arms()
            .iter()
            .map(|a| a.sampler_seconds() + a.instrumentation_seconds())
            .sum();
        (elapsed - sampler).max(0.0)
    } else {
        0.0
    };
    let per_arm_counts: Vec<u64> = set.arms().iter().map(TimedArm::draws).collect();

    let mut report = RunReport {
        algorithm,
        seed,
        tau: sel.tau,
        lambda: sel.lambda,
        p: sel.p,
        chosen_index: None,
        chosen_xi: None,
        total_samples: per_arm_counts.iter().sum(),
        per_arm_counts,
        wall_other,
        success: false,
        iterations: 0,
        error: None,
        selection: None,
    };
    match outcome {
        Ok(result) => {
            report.chosen_index = Some(result.chosen);
            report.chosen_xi = problem.label(result.chosen);
            report.success = problem.is_relative_pac(result.chosen, sel.tau);
            report.iterations = result.iterations;
            debug_assert_eq!(report.total_samples, result.total_samples);
            report.selection = Some(result);
        }
        Err(e) => report.error = Some(e),
    }
    report
}

/// Modelled runtime `total_samples * t_star + wall_other`.
pub fn runtime_model(report: &RunReport, t_star: f64) -> f64 {
    report.total_samples as f64 * t_star + report.wall_other
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacSummary {
    pub success_rate: f64,
    pub mean_m: f64,
    pub std_m: f64,
    pub mean_wall_other: f64,
    pub failures: usize,
    pub reports: Vec<RunReport>,
}

impl PacSummary {
    fn from_reports(reports: Vec<RunReport>) -> Self {
        let n = reports.len() as f64;
        let successes = reports.iter().filter(|r| r.success).count();
        let counts: Vec<f64> = reports.iter().map(|r| r.total_samples as f64).collect();
        let mean_m = counts.iter().sum::<f64>() / n;
        let std_m = if reports.len() > 1 {
            (counts.iter().map(|m| (m - mean_m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self {
            success_rate: successes as f64 / n,
            mean_m,
            std_m,
            mean_wall_other: reports.iter().map(|r| r.wall_other).sum::<f64>() / n,
            failures: reports.iter().filter(|r| r.error.is_some()).count(),
            reports,
        }
    }

    /// Mean modelled runtime over the replications.
    pub fn mean_runtime(&self, t_star: f64) -> f64 {
        self.reports
            .iter()
            .map(|r| runtime_model(r, t_star))
            .sum::<f64>()
            / self.reports.len() as f64
    }
}

/// `reps` seeded replications; replication `r` uses `derive_seed(master_seed, r)`.
///
/// Failed runs count as unsuccessful and contribute their partial sample
/// counts; they never abort the batch.
pub fn verify_pac(
    algorithm: Algorithm,
    problem: &Problem,
    config: &RunConfig,
    reps: usize,
    master_seed: u64,
) -> Result<PacSummary, HarnessError> {
    if reps == 0 {
        return Err(HarnessError::Config("reps must be at least 1".into()));
    }
    config.selection.validate()?;
    let reports: Vec<RunReport> = (0..reps)
        .into_par_iter()
        .map(|r| {
            run_once(
                algorithm,
                problem,
                config,
                derive_seed(master_seed, r as u64),
            )
        })
        .collect();
    Ok(PacSummary::from_reports(reports))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub taus: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub reps: usize,
    pub algorithm: Algorithm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub algorithm: Algorithm,
    pub tau: f64,
    pub lambda: f64,
    pub reps: usize,
    pub mean_m: f64,
    pub std_m: f64,
    pub success_rate: f64,
    pub failures: usize,
}

/// One row per `(tau, lambda)` cell, taus outermost. Every cell reuses the
/// same replication seeds.
pub fn sweep(
    grid: &SweepGrid,
    problem: &Problem,
    base: &RunConfig,
    master_seed: u64,
) -> Result<Vec<SweepRow>, HarnessError> {
    if grid.taus.is_empty() || grid.lambdas.is_empty() {
        return Err(HarnessError::Config(
            "sweep needs at least one tau and one lambda".into(),
        ));
    }
    if grid.reps == 0 {
        return Err(HarnessError::Config("reps must be at least 1".into()));
    }
    for &(name, values) in &[("tau", &grid.taus), ("lambda", &grid.lambdas)] {
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
            return Err(HarnessError::Config(format!(
                "{name} = {v} is outside (0, 1)"
            )));
        }
    }
    let mut rows = Vec::with_capacity(grid.taus.len() * grid.lambdas.len());
    for &tau in &grid.taus {
        for &lambda in &grid.lambdas {
            let mut config = *base;
            config.selection.tau = tau;
            config.selection.lambda = lambda;
            let summary = verify_pac(grid.algorithm, problem, &config, grid.reps, master_seed)?;
            rows.push(SweepRow {
                algorithm: grid.algorithm,
                tau,
                lambda,
                reps: grid.reps,
                mean_m: summary.mean_m,
                std_m: summary.std_m,
                success_rate: summary.success_rate,
                failures: summary.failures,
            });
        }
    }
    Ok(rows)
}

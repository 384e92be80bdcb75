//! Best-arm selection in relative precision.
//!
//! Four selectors share one output type, [`SelectionResult`]:
//!
//! * [`nonadaptive_maximize`] estimates every arm to relative precision and
//!   returns the largest estimate.
//! * [`adaptive_maximize`] races the arms, resampling every arm whose upper
//!   confidence bound reaches the best lower bound (arms may re-enter).
//! * [`ucbv_maximize`] keeps the racing skeleton but only resamples the arm
//!   with the highest upper bound.
//! * [`median_elimination`] is the absolute-precision halving baseline.
//!
//! Argmax ties are always broken towards the lowest arm index.

mod median;
mod nonadaptive;
mod racing;

pub use median::median_elimination;
pub use nonadaptive::nonadaptive_maximize;
pub use racing::{adaptive_maximize, ucbv_maximize};

use thiserror::Error;

use crate::arms::ArmOracle;
use crate::concentration::{DomainError, Range, RunningStats, Schedule, DEFAULT_EXPONENT};
use crate::estimator::DEFAULT_CAP;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BanditError {
    #[error("arm set is empty")]
    EmptyArmSet,
    #[error("{name} = {value} is outside (0, 1)")]
    OutOfUnitInterval { name: &'static str, value: f64 },
    #[error("batch size must be at least 1")]
    ZeroBatch,
    #[error("sample cap must be at least 1")]
    ZeroCap,
    #[error("absolute precision must be positive (got {0})")]
    InvalidPrecision(f64),
    #[error("arm {arm} reached the cap after {} draws ({total_samples} draws in total)", partial.count())]
    CapExceeded {
        arm: usize,
        partial: RunningStats,
        total_samples: u64,
    },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Finite, ordered collection of arms. Index `i` is the arm's identity.
#[derive(Debug, Clone)]
pub struct ArmSet<A> {
    arms: Vec<A>,
    labels: Option<Vec<f64>>,
}

impl<A: ArmOracle> ArmSet<A> {
    pub fn new(arms: Vec<A>) -> Result<Self, BanditError> {
        if arms.is_empty() {
            return Err(BanditError::EmptyArmSet);
        }
        Ok(Self { arms, labels: None })
    }

    pub fn with_labels(arms: Vec<A>, labels: Vec<f64>) -> Result<Self, BanditError> {
        assert_eq!(arms.len(), labels.len(), "one label per arm");
        let mut set = Self::new(arms)?;
        set.labels = Some(labels);
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    pub fn arms(&self) -> &[A] {
        &self.arms
    }

    pub fn arms_mut(&mut self) -> &mut [A] {
        &mut self.arms
    }

    pub fn into_arms(self) -> Vec<A> {
        self.arms
    }
}

/// `tau / (2 + tau)`, or `tau / (2 - tau)` when all means are known positive.
pub fn epsilon_from_tau(tau: f64, positive_means: bool) -> f64 {
    if positive_means {
        tau / (2.0 - tau)
    } else {
        tau / (2.0 + tau)
    }
}

/// Parameters shared by the relative-precision selectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig {
    pub tau: f64,
    pub lambda: f64,
    pub p: f64,
    pub positive_means: bool,
    /// Draws per selected arm per iteration (racing selectors only).
    pub batch_size: u64,
    /// Per-arm draw cap.
    pub cap: u64,
    pub record_history: bool,
}

impl SelectionConfig {
    pub fn new(tau: f64, lambda: f64) -> Self {
        Self {
            tau,
            lambda,
            ..Self::default()
        }
    }

    pub fn epsilon(&self) -> f64 {
        epsilon_from_tau(self.tau, self.positive_means)
    }

    pub(crate) fn validate(&self) -> Result<(), BanditError> {
        check_unit("tau", self.tau)?;
        check_unit("lambda", self.lambda)?;
        if !(self.p > 1.0) {
            return Err(DomainError::InvalidExponent(self.p).into());
        }
        if self.batch_size == 0 {
            return Err(BanditError::ZeroBatch);
        }
        if self.cap == 0 {
            return Err(BanditError::ZeroCap);
        }
        Ok(())
    }

    /// Schedule with `delta = lambda / n_arms`.
    pub(crate) fn schedule(&self, n_arms: usize) -> Result<Schedule, BanditError> {
        Ok(Schedule::new(self.lambda / n_arms as f64, self.p)?)
    }
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            tau: 0.1,
            lambda: 0.1,
            p: DEFAULT_EXPONENT,
            positive_means: false,
            batch_size: 1,
            cap: DEFAULT_CAP,
            record_history: false,
        }
    }
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<(), BanditError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(BanditError::OutOfUnitInterval { name, value })
    }
}

/// Running statistics of one arm plus its confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmState {
    pub stats: RunningStats,
    /// `c` at the current sample size; `+inf` before the first draw.
    pub half_width: f64,
    /// `c / |mean|`, or `+inf` when `m = 0` or the mean is exactly zero.
    pub eps_rel: f64,
    pub beta_lo: f64,
    pub beta_hi: f64,
}

impl Default for ArmState {
    fn default() -> Self {
        Self {
            stats: RunningStats::new(),
            half_width: f64::INFINITY,
            eps_rel: f64::INFINITY,
            beta_lo: f64::NEG_INFINITY,
            beta_hi: f64::INFINITY,
        }
    }
}

impl ArmState {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.stats.push(x);
    }

    /// Recomputes the half-width and derived quantities after new draws.
    #[inline]
    pub fn refresh(&mut self, range: &Range, schedule: &Schedule) {
        if self.stats.count() == 0 {
            *self = Self::default();
            return;
        }
        let c = self.stats.half_width_unchecked(range, schedule);
        let mean = self.stats.mean();
        self.half_width = c;
        self.eps_rel = if mean == 0.0 {
            f64::INFINITY
        } else {
            c / mean.abs()
        };
        self.beta_lo = mean - c;
        self.beta_hi = mean + c;
    }

    pub fn count(&self) -> u64 {
        self.stats.count()
    }

    pub fn sign(&self) -> f64 {
        self.stats.mean().signum()
    }

    /// Shrunk estimate `mean - eps_rel * sign * c` when `eps_rel < 1`, the
    /// plain mean otherwise, NaN before any draw.
    pub fn estimate(&self) -> f64 {
        if self.count() == 0 {
            return f64::NAN;
        }
        let mean = self.stats.mean();
        if self.eps_rel < 1.0 {
            mean - self.eps_rel * self.sign() * self.half_width
        } else {
            mean
        }
    }
}

/// One racing iteration, recorded after the active set was rebuilt.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// Arms drawn from during this iteration.
    pub sampled: Vec<usize>,
    pub beta_lo: Vec<f64>,
    pub beta_hi: Vec<f64>,
    pub eps_rel: Vec<f64>,
    /// The next active set.
    pub active: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub chosen: usize,
    pub estimates: Vec<f64>,
    pub counts: Vec<u64>,
    pub total_samples: u64,
    pub iterations: u64,
    pub beta_lo: Vec<f64>,
    pub beta_hi: Vec<f64>,
    /// Arms eligible for the final argmax.
    pub active: Vec<usize>,
    pub history: Option<Vec<IterationRecord>>,
}

/// Index of the largest value among `candidates`, lowest index on ties. NaN
/// never wins.
pub(crate) fn argmax_by<F: Fn(usize) -> f64>(
    candidates: impl IntoIterator<Item = usize>,
    value: F,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for i in candidates {
        let v = value(i);
        match best {
            None => best = Some((i, v)),
            Some((j, bv)) => {
                if v > bv || (bv.is_nan() && !v.is_nan()) || (v == bv && i < j) {
                    best = Some((i, v));
                }
            }
        }
    }
    best.map(|(i, _)| i)
}

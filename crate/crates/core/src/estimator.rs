//! Relative-precision Monte-Carlo mean estimation with adaptive stopping.
//!
//! Draws are taken one at a time until the empirical-Bernstein half-width
//! satisfies `c_m <= epsilon * |mean_m|`. The returned estimate
//! `mean_M - epsilon * sign(mean_M) * c_M` is within `epsilon * |E[Z]|` of the
//! true mean with probability at least `1 - delta` whenever `E[Z] != 0`.

use thiserror::Error;

use crate::arms::ArmOracle;
use crate::concentration::{DomainError, Range, RunningStats, Schedule};

/// Default per-arm safety cap on the number of draws.
pub const DEFAULT_CAP: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error("epsilon = {0} is outside (0, 1)")]
    InvalidEpsilon(f64),
    #[error("sample cap must be at least 1")]
    ZeroCap,
    #[error("no stop after {} draws (mean {}); E[Z] is likely 0 or the cap is too small", partial.count(), partial.mean())]
    CapExceeded { partial: RunningStats },
    #[error("mu must be nonzero")]
    ZeroMean,
    #[error("delta = {0} exceeds 3/4, outside the complexity bound's hypothesis")]
    DeltaTooLarge(f64),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stopping_time: u64,
    pub epsilon_used: f64,
    /// `c_M`.
    pub achieved_half_width: f64,
    /// `sign(mean_at_stop)`, either `1.0` or `-1.0`.
    pub sign: f64,
    pub mean_at_stop: f64,
    pub variance_at_stop: f64,
}

/// Samples `arm` until the relative stopping rule fires.
pub fn estimate_mean<A: ArmOracle + ?Sized>(
    arm: &mut A,
    epsilon: f64,
    schedule: &Schedule,
    cap: u64,
) -> Result<Estimate, EstimateError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(EstimateError::InvalidEpsilon(epsilon));
    }
    if cap == 0 {
        return Err(EstimateError::ZeroCap);
    }
    let range = arm.range();
    let mut stats = RunningStats::new();
    while stats.count() < cap {
        stats.push(arm.draw());
        let c = stats.half_width_unchecked(&range, schedule);
        let mean = stats.mean();
        if c <= epsilon * mean.abs() {
            // c > 0, so the stop forces mean != 0.
            let sign = mean.signum();
            return Ok(Estimate {
                value: mean - epsilon * sign * c,
                stopping_time: stats.count(),
                epsilon_used: epsilon,
                achieved_half_width: c,
                sign,
                mean_at_stop: mean,
                variance_at_stop: stats.variance(),
            });
        }
    }
    Err(EstimateError::CapExceeded { partial: stats })
}

/// `(sqrt(2 + 2 sqrt 2 + 2/3) + 3)^2`.
pub fn gamma_constant() -> f64 {
    ((2.0 + 2.0 * std::f64::consts::SQRT_2 + 2.0 / 3.0).sqrt() + 3.0).powi(2)
}

/// High-probability ceiling on the stopping time of [`estimate_mean`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityBound {
    pub nu: f64,
    pub gamma: f64,
    /// `P(M > k) <= tail_probability`.
    pub k: u64,
    /// Upper bound on `E[M]`, `k + 4 delta / 3`.
    pub expected_m_bound: f64,
    pub tail_probability: f64,
}

/// Stopping-time bound for an arm with mean `mu` and variance `sigma2`.
pub fn complexity_bound(
    mu: f64,
    sigma2: f64,
    epsilon: f64,
    schedule: &Schedule,
    range: &Range,
) -> Result<ComplexityBound, EstimateError> {
    if mu == 0.0 || !mu.is_finite() {
        return Err(EstimateError::ZeroMean);
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(EstimateError::InvalidEpsilon(epsilon));
    }
    if !(sigma2 >= 0.0) {
        return Err(DomainError::InvalidParameter {
            name: "sigma2",
            value: sigma2,
            requirement: "nonnegative",
        }
        .into());
    }
    let delta = schedule.delta();
    if delta > 0.75 {
        return Err(EstimateError::DeltaTooLarge(delta));
    }
    let gamma = gamma_constant();
    let target = epsilon * epsilon * mu * mu;
    let spread = sigma2.max(target);
    let width2 = range.width() * range.width();
    let nu = (spread / width2).min(target / ((1.0 + epsilon).powi(2) * spread * gamma));
    let p = schedule.exponent();
    let raw = (2.0 / nu) * (p * (2.0 * p / nu).ln() + (3.0 / (schedule.c() * delta)).ln());
    let tail = 4.0 * delta / 3.0;
    let k = raw.ceil() as u64;
    Ok(ComplexityBound {
        nu,
        gamma,
        k,
        expected_m_bound: k as f64 + tail,
        tail_probability: tail,
    })
}

//! Streaming statistics and empirical-Bernstein confidence bounds.
//!
//! All logarithms in this crate are natural logarithms.
//!
//! The confidence budget at sample size `m` follows the schedule
//! `d_m = delta * c * m^(-p)` with `c = (p - 1) / p`, whose sum over all
//! `m >= 1` is `delta * c * zeta(p)`. For `p >= 2` that sum stays below
//! `delta`, so a union bound over every sample size costs at most `delta`.

use thiserror::Error;

/// Default exponent of the confidence schedule.
pub const DEFAULT_EXPONENT: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("sample count must be at least 1")]
    ZeroSamples,
    #[error("probability {0} is outside (0, 1)")]
    InvalidProbability(f64),
    #[error("schedule exponent p = {0} must be > 1")]
    InvalidExponent(f64),
    #[error("invalid range [{a}, {b}]: need finite a < b")]
    InvalidRange { a: f64, b: f64 },
    #[error("log lemma needs q > 0, k > 0 and 2q/k > 1 (got q = {q}, k = {k})")]
    LemmaInapplicable { q: f64, k: f64 },
    #[error("{name} = {value} must be {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
}

/// Known support `[a, b]` of a bounded random variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    a: f64,
    b: f64,
}

impl Range {
    pub fn new(a: f64, b: f64) -> Result<Self, DomainError> {
        if a.is_finite() && b.is_finite() && a < b {
            Ok(Self { a, b })
        } else {
            Err(DomainError::InvalidRange { a, b })
        }
    }

    pub fn lower(&self) -> f64 {
        self.a
    }

    pub fn upper(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    /// Smallest range covering both `self` and `other`.
    pub fn union(&self, other: &Range) -> Range {
        Range {
            a: self.a.min(other.a),
            b: self.b.max(other.b),
        }
    }
}

/// The confidence-level sequence `d_m = delta * c * m^(-p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    delta: f64,
    p: f64,
    c: f64,
    // ln 3 - ln delta - ln c, so that ln(3 / d_m) = log_offset + p ln m.
    log_offset: f64,
}

impl Schedule {
    pub fn new(delta: f64, p: f64) -> Result<Self, DomainError> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(DomainError::InvalidProbability(delta));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(DomainError::InvalidExponent(p));
        }
        let c = (p - 1.0) / p;
        Ok(Self {
            delta,
            p,
            c,
            log_offset: 3f64.ln() - delta.ln() - c.ln(),
        })
    }

    /// Schedule with the default exponent `p = 2` (so `c = 1/2`).
    pub fn with_default_exponent(delta: f64) -> Result<Self, DomainError> {
        Self::new(delta, DEFAULT_EXPONENT)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn exponent(&self) -> f64 {
        self.p
    }

    /// The cached constant `c = (p - 1) / p`.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Confidence budget `d_m` spent at sample size `m`.
    ///
    /// Underflows to zero for astronomically large `m`; use
    /// [`Schedule::log_three_over`] for the half-width, which never does.
    pub fn dm(&self, m: u64) -> Result<f64, DomainError> {
        if m == 0 {
            return Err(DomainError::ZeroSamples);
        }
        Ok(self.delta * self.c * (m as f64).powf(-self.p))
    }

    /// `ln(3 / d_m)` evaluated as `ln 3 - ln delta - ln c + p ln m`.
    ///
    /// Returns `+inf` for `m = 0`.
    #[inline]
    pub fn log_three_over(&self, m: u64) -> f64 {
        if m == 0 {
            return f64::INFINITY;
        }
        self.log_offset + self.p * (m as f64).ln()
    }
}

/// Single-pass running count, mean and biased (1/m) variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    // Sum of squared deviations from the running mean.
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_slice(values: &[f64]) -> Self {
        let mut stats = Self::new();
        for &x in values {
            stats.push(x);
        }
        stats
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Empirical variance with the 1/m normalisation; zero for `m <= 1`.
    #[inline]
    pub fn variance(&self) -> f64 {
        if self.count <= 1 {
            0.0
        } else {
            (self.m2 / self.count as f64).max(0.0)
        }
    }

    /// Empirical-Bernstein half-width `c_m` for the current sample size.
    pub fn half_width(&self, range: &Range, schedule: &Schedule) -> Result<f64, DomainError> {
        if self.count == 0 {
            return Err(DomainError::ZeroSamples);
        }
        Ok(self.half_width_unchecked(range, schedule))
    }

    #[inline]
    pub(crate) fn half_width_unchecked(&self, range: &Range, schedule: &Schedule) -> f64 {
        bernstein_half_width(
            self.variance(),
            self.count,
            range.width(),
            schedule.log_three_over(self.count),
        )
    }
}

/// `sqrt(2 var L / m) + 3 width L / m` where `L` is the supplied log term.
#[inline]
pub fn bernstein_half_width(variance: f64, m: u64, width: f64, log_term: f64) -> f64 {
    let m = m as f64;
    (2.0 * variance * log_term / m).sqrt() + 3.0 * width * log_term / m
}

/// Whether the realised statistics satisfy the empirical-Bernstein event
/// `|mean - true_mean| <= sqrt(2 V ln(3/x) / m) + 3 (b - a) ln(3/x) / m`.
pub fn bernstein_event_holds(
    true_mean: f64,
    stats: &RunningStats,
    range: &Range,
    x: f64,
) -> Result<bool, DomainError> {
    if stats.count() == 0 {
        return Err(DomainError::ZeroSamples);
    }
    if !(x > 0.0 && x < 1.0) {
        return Err(DomainError::InvalidProbability(x));
    }
    let bound = bernstein_half_width(
        stats.variance(),
        stats.count(),
        range.width(),
        (3.0 / x).ln(),
    );
    Ok((stats.mean() - true_mean).abs() <= bound)
}

/// High-probability ceiling on the empirical variance of `m` draws:
/// `sigma2 + sqrt(2 sigma2 (b-a)^2 x / m) + x (b-a)^2 / (3m)`, exceeded
/// with probability at most `exp(-x)`.
pub fn variance_upper_bound(
    sigma2: f64,
    range: &Range,
    x: f64,
    m: u64,
) -> Result<f64, DomainError> {
    if m == 0 {
        return Err(DomainError::ZeroSamples);
    }
    if !(sigma2 >= 0.0) {
        return Err(DomainError::InvalidParameter {
            name: "sigma2",
            value: sigma2,
            requirement: "nonnegative",
        });
    }
    if !(x > 0.0) {
        return Err(DomainError::InvalidParameter {
            name: "x",
            value: x,
            requirement: "positive",
        });
    }
    let w2 = range.width() * range.width();
    let m = m as f64;
    Ok(sigma2 + (2.0 * sigma2 * w2 * x / m).sqrt() + x * w2 / (3.0 * m))
}

/// Upper bound `(2/k) ln(2q/k)` on any solution `t` of `ln(q t) / t = k`.
///
/// Every `t' >= bound` also satisfies `ln(q t') / t' <= k`.
pub fn log_lemma_bound(q: f64, k: f64) -> Result<f64, DomainError> {
    if !(q > 0.0 && k > 0.0) || !(2.0 * q / k > 1.0) {
        return Err(DomainError::LemmaInapplicable { q, k });
    }
    Ok((2.0 / k) * (2.0 * q / k).ln())
}

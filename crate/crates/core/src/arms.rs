//! Samplable bounded arms.
//!
//! An arm owns its random stream, so algorithms only ever ask it for the
//! next draw. Streams are `Xoshiro256PlusPlus` generators seeded through
//! [`derive_seed`], which makes every draw a pure function of the seed.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::concentration::{DomainError, Range};

/// A bounded random variable that can be sampled one draw at a time.
pub trait ArmOracle {
    /// Known support of every draw.
    fn range(&self) -> Range;

    /// One independent draw. Must lie in [`ArmOracle::range`].
    fn draw(&mut self) -> f64;
}

impl<A: ArmOracle + ?Sized> ArmOracle for &mut A {
    fn range(&self) -> Range {
        (**self).range()
    }

    fn draw(&mut self) -> f64 {
        (**self).draw()
    }
}

impl<A: ArmOracle + ?Sized> ArmOracle for Box<A> {
    fn range(&self) -> Range {
        (**self).range()
    }

    fn draw(&mut self) -> f64 {
        (**self).draw()
    }
}

/// Distribution families understood by problem files.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArmDistribution {
    /// `shift + U(-half_width, half_width)`, sampled on the half-open interval.
    UniformShifted { shift: f64, half_width: f64 },
    /// `high` with probability `p`, otherwise `low`.
    BernoulliAffine { p: f64, low: f64, high: f64 },
    /// Always `value`.
    Degenerate { value: f64 },
}

impl ArmDistribution {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::UniformShifted { .. } => "uniform-shifted",
            Self::BernoulliAffine { .. } => "bernoulli-affine",
            Self::Degenerate { .. } => "degenerate",
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::UniformShifted { shift, .. } => shift,
            Self::BernoulliAffine { p, low, high } => low + p * (high - low),
            Self::Degenerate { value } => value,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::UniformShifted { half_width, .. } => half_width * half_width / 3.0,
            Self::BernoulliAffine { p, low, high } => p * (1.0 - p) * (high - low) * (high - low),
            Self::Degenerate { .. } => 0.0,
        }
    }

    /// Smallest interval containing the support.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::UniformShifted { shift, half_width } => (shift - half_width, shift + half_width),
            Self::BernoulliAffine { low, high, .. } => (low.min(high), low.max(high)),
            Self::Degenerate { value } => (value, value),
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::UniformShifted { shift, half_width } => {
                let u: f64 = rng.random();
                shift + half_width * (2.0 * u - 1.0)
            }
            Self::BernoulliAffine { p, low, high } => {
                if rng.random::<f64>() < p {
                    high
                } else {
                    low
                }
            }
            Self::Degenerate { value } => value,
        }
    }
}

/// Static description of one arm: distribution, declared range and an
/// optional parameter label.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSpec {
    pub distribution: ArmDistribution,
    pub range: Range,
    pub label: Option<f64>,
    pub true_mean: f64,
}

impl ArmSpec {
    /// Builds a spec whose oracle mean is the analytic mean of `distribution`.
    pub fn new(distribution: ArmDistribution, range: Range) -> Result<Self, DomainError> {
        let (lo, hi) = distribution.support();
        if !(range.contains(lo) && range.contains(hi)) {
            return Err(DomainError::InvalidParameter {
                name: "range",
                value: if range.contains(lo) { hi } else { lo },
                requirement: "inside the declared range",
            });
        }
        Ok(Self {
            true_mean: distribution.mean(),
            distribution,
            range,
            label: None,
        })
    }

    pub fn with_label(mut self, label: f64) -> Self {
        self.label = Some(label);
        self
    }

    pub fn with_true_mean(mut self, mean: f64) -> Self {
        self.true_mean = mean;
        self
    }

    pub fn seeded(&self, seed: u64) -> SeededArm {
        SeededArm::new(self.distribution, self.range, seed)
    }
}

/// An arm drawing from its distribution with a private generator.
#[derive(Debug, Clone)]
pub struct SeededArm {
    distribution: ArmDistribution,
    range: Range,
    rng: Xoshiro256PlusPlus,
}

impl SeededArm {
    pub fn new(distribution: ArmDistribution, range: Range, seed: u64) -> Self {
        Self {
            distribution,
            range,
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn distribution(&self) -> &ArmDistribution {
        &self.distribution
    }
}

impl ArmOracle for SeededArm {
    fn range(&self) -> Range {
        self.range
    }

    #[inline]
    fn draw(&mut self) -> f64 {
        let x = self.distribution.sample(&mut self.rng);
        debug_assert!(self.range.contains(x), "draw {x} outside {:?}", self.range);
        x
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for stream `index` under `parent`.
///
/// `derive_seed(derive_seed(master, replication), arm)` is the seed of one
/// arm in one replication.
#[inline]
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    splitmix64(parent ^ splitmix64(index.wrapping_mul(GOLDEN_GAMMA) ^ 0xA076_1D64_78BD_642F))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_draws_stay_in_range() {
        let d = ArmDistribution::UniformShifted {
            shift: 0.3,
            half_width: 0.05,
        };
        let spec = ArmSpec::new(d, Range::new(0.25, 0.35).unwrap()).unwrap();
        let mut arm = spec.seeded(7);
        for _ in 0..10_000 {
            let x = arm.draw();
            assert!((0.25..0.35).contains(&x));
        }
    }

    #[test]
    fn bernoulli_moments() {
        let d = ArmDistribution::BernoulliAffine {
            p: 0.25,
            low: -1.0,
            high: 3.0,
        };
        assert_eq!(d.mean(), 0.0);
        assert_eq!(d.variance(), 0.25 * 0.75 * 16.0);
        let spec = ArmSpec::new(d, Range::new(-1.0, 3.0).unwrap()).unwrap();
        let mut arm = spec.seeded(1);
        let n = 200_000;
        let hits = (0..n).filter(|_| arm.draw() == 3.0).count();
        assert!((hits as f64 / n as f64 - 0.25).abs() < 0.01);
    }

    #[test]
    fn spec_rejects_support_outside_range() {
        let d = ArmDistribution::Degenerate { value: 2.0 };
        assert!(ArmSpec::new(d, Range::new(0.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn same_seed_same_stream() {
        let d = ArmDistribution::UniformShifted {
            shift: 0.0,
            half_width: 1.0,
        };
        let r = Range::new(-1.0, 1.0).unwrap();
        let mut a = SeededArm::new(d, r, 99);
        let mut b = SeededArm::new(d, r, 99);
        for _ in 0..100 {
            assert_eq!(a.draw().to_bits(), b.draw().to_bits());
        }
        let mut c = SeededArm::new(d, r, 100);
        assert_ne!(a.draw(), c.draw());
    }

    #[test]
    fn derived_seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for rep in 0..50 {
            let run = derive_seed(42, rep);
            for arm in 0..101 {
                assert!(seen.insert(derive_seed(run, arm)));
            }
        }
        assert_eq!(derive_seed(1, 2), derive_seed(1, 2));
    }
}

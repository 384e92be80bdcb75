use super::HarnessError;
use crate::arms::{derive_seed, ArmDistribution, ArmSpec, SeededArm};
use crate::bandit::ArmSet;
use crate::concentration::Range;

/// A finite family of arms together with their true means.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    arms: Vec<ArmSpec>,
}

impl Problem {
    pub fn new(arms: Vec<ArmSpec>) -> Result<Self, HarnessError> {
        if arms.is_empty() {
            return Err(HarnessError::Config("problem has no arms".into()));
        }
        Ok(Self { arms })
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn specs(&self) -> &[ArmSpec] {
        &self.arms
    }

    pub fn oracle_means(&self) -> Vec<f64> {
        self.arms.iter().map(|a| a.true_mean).collect()
    }

    pub fn label(&self, i: usize) -> Option<f64> {
        self.arms[i].label
    }

    /// Index of the best true mean (lowest index on ties).
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, a) in self.arms.iter().enumerate() {
            if a.true_mean > self.arms[best].true_mean {
                best = i;
            }
        }
        best
    }

    pub fn best_mean(&self) -> f64 {
        self.arms[self.best_index()].true_mean
    }

    /// Whether `chosen` is within `tau * |best|` of the best true mean.
    pub fn is_relative_pac(&self, chosen: usize, tau: f64) -> bool {
        let best = self.best_mean();
        best - self.arms[chosen].true_mean <= tau * best.abs()
    }

    /// Keeps the listed arms, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self, HarnessError> {
        let arms = indices
            .iter()
            .map(|&i| {
                self.arms
                    .get(i)
                    .cloned()
                    .ok_or_else(|| HarnessError::Config(format!("arm index {i} out of bounds")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(arms)
    }

    /// Seeded arms for one run: arm `i` uses `derive_seed(seed, i)`.
    pub fn instantiate(&self, seed: u64) -> Vec<SeededArm> {
        self.arms
            .iter()
            .enumerate()
            .map(|(i, spec)| spec.seeded(derive_seed(seed, i as u64)))
            .collect()
    }

    pub fn arm_set(&self, seed: u64) -> ArmSet<SeededArm> {
        ArmSet::new(self.instantiate(seed)).expect("problem is non-empty")
    }
}

/// `sin(x) + sin(10 x / 3)`.
pub fn toy_function(x: f64) -> f64 {
    x.sin() + (10.0 * x / 3.0).sin()
}

/// Grid `xi_min + i * step` for `i < count`, with arm `i` drawing
/// `toy_function(xi_i) + U(-h, h)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToySpec {
    pub xi_min: f64,
    pub step: f64,
    pub count: usize,
    pub noise_half_width: f64,
}

impl Default for ToySpec {
    fn default() -> Self {
        Self {
            xi_min: 3.0,
            step: 0.04,
            count: 101,
            noise_half_width: 1.0 / 20.0,
        }
    }
}

impl ToySpec {
    pub fn grid(&self) -> Vec<f64> {
        (0..self.count)
            .map(|i| self.xi_min + self.step * i as f64)
            .collect()
    }
}

pub fn toy_arms(spec: &ToySpec) -> Result<Problem, HarnessError> {
    if spec.count == 0 || !(spec.noise_half_width > 0.0) || !spec.step.is_finite() {
        return Err(HarnessError::Config(format!("invalid toy spec {spec:?}")));
    }
    let h = spec.noise_half_width;
    let arms = spec
        .grid()
        .into_iter()
        .map(|xi| {
            let f = toy_function(xi);
            let range =
                Range::new(f - h, f + h).map_err(|e| HarnessError::Config(e.to_string()))?;
            let dist = ArmDistribution::UniformShifted {
                shift: f,
                half_width: h,
            };
            Ok(ArmSpec::new(dist, range)
                .map_err(|e| HarnessError::Config(e.to_string()))?
                .with_label(xi))
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Problem::new(arms)
}

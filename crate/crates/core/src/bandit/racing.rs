use super::{
    argmax_by, ArmSet, ArmState, BanditError, IterationRecord, SelectionConfig, SelectionResult,
};
use crate::arms::ArmOracle;
use crate::concentration::{Range, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sampling {
    /// Every active arm, every iteration.
    AllActive,
    /// Only the active arm with the highest upper bound.
    HighestUpper,
}

/// Adaptive racing selector.
///
/// Each iteration draws `batch_size` samples from every arm of the active
/// set, then rebuilds the active set over *all* arms as
/// `{ i : beta_hi[i] >= max_j beta_lo[j] }`. Runs until one arm is left or
/// every active arm has `eps_rel <= epsilon`, and returns the active arm with
/// the largest estimate.
pub fn adaptive_maximize<A: ArmOracle>(
    arms: &mut ArmSet<A>,
    config: &SelectionConfig,
) -> Result<SelectionResult, BanditError> {
    race(arms, config, Sampling::AllActive)
}

/// Racing skeleton that only resamples the active arm with the highest
/// upper bound each iteration. Unsampled arms have an infinite upper bound,
/// so every arm is drawn once before any arm is drawn twice.
pub fn ucbv_maximize<A: ArmOracle>(
    arms: &mut ArmSet<A>,
    config: &SelectionConfig,
) -> Result<SelectionResult, BanditError> {
    race(arms, config, Sampling::HighestUpper)
}

struct Race<'a, A> {
    arms: &'a mut [A],
    ranges: Vec<Range>,
    states: Vec<ArmState>,
    schedule: Schedule,
    batch: u64,
    cap: u64,
    total: u64,
}

impl<A: ArmOracle> Race<'_, A> {
    fn sample(&mut self, i: usize) -> Result<(), BanditError> {
        let state = &mut self.states[i];
        if state.count() + self.batch > self.cap {
            return Err(BanditError::CapExceeded {
                arm: i,
                partial: state.stats,
                total_samples: self.total,
            });
        }
        let arm = &mut self.arms[i];
        for _ in 0..self.batch {
            state.push(arm.draw());
        }
        self.total += self.batch;
        state.refresh(&self.ranges[i], &self.schedule);
        Ok(())
    }
}

fn race<A: ArmOracle>(
    arms: &mut ArmSet<A>,
    config: &SelectionConfig,
    sampling: Sampling,
) -> Result<SelectionResult, BanditError> {
    config.validate()?;
    let n = arms.len();
    let threshold = config.epsilon();
    let ranges = arms.arms().iter().map(|a| a.range()).collect();
    let mut race = Race {
        arms: arms.arms_mut(),
        ranges,
        states: vec![ArmState::default(); n],
        schedule: config.schedule(n)?,
        batch: config.batch_size,
        cap: config.cap,
        total: 0,
    };

    let mut active: Vec<usize> = (0..n).collect();
    let mut sampled = Vec::with_capacity(n);
    let mut history = config.record_history.then(Vec::new);
    let mut iterations = 0u64;

    loop {
        if active.len() <= 1 {
            break;
        }
        let worst = active
            .iter()
            .map(|&i| race.states[i].eps_rel)
            .fold(f64::NEG_INFINITY, f64::max);
        if worst <= threshold {
            break;
        }

        sampled.clear();
        match sampling {
            Sampling::AllActive => sampled.extend_from_slice(&active),
            Sampling::HighestUpper => {
                let states = &race.states;
                let top = argmax_by(active.iter().copied(), |i| states[i].beta_hi)
                    .expect("active set is non-empty");
                sampled.push(top);
            }
        }
        for &i in &sampled {
            race.sample(i)?;
        }
        iterations += 1;

        let best_lo = race
            .states
            .iter()
            .map(|s| s.beta_lo)
            .fold(f64::NEG_INFINITY, f64::max);
        active.clear();
        active.extend((0..n).filter(|&i| race.states[i].beta_hi >= best_lo));

        if let Some(h) = history.as_mut() {
            h.push(IterationRecord {
                sampled: sampled.clone(),
                beta_lo: race.states.iter().map(|s| s.beta_lo).collect(),
                beta_hi: race.states.iter().map(|s| s.beta_hi).collect(),
                eps_rel: race.states.iter().map(|s| s.eps_rel).collect(),
                active: active.clone(),
            });
        }
    }

    let states = &race.states;
    let chosen = argmax_by(active.iter().copied(), |i| states[i].estimate())
        .expect("active set is non-empty");
    Ok(SelectionResult {
        chosen,
        estimates: states.iter().map(ArmState::estimate).collect(),
        counts: states.iter().map(ArmState::count).collect(),
        total_samples: race.total,
        iterations,
        beta_lo: states.iter().map(|s| s.beta_lo).collect(),
        beta_hi: states.iter().map(|s| s.beta_hi).collect(),
        active,
        history,
    })
}

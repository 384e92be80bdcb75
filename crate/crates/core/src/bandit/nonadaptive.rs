use super::{ArmSet, BanditError, SelectionConfig, SelectionResult};
use crate::arms::ArmOracle;
use crate::estimator::{estimate_mean, EstimateError};

/// Estimates every arm independently to relative precision
/// `epsilon = tau / (2 + tau)` at confidence `lambda / n_arms`, then returns
/// the arm with the largest estimate.
pub fn nonadaptive_maximize<A: ArmOracle>(
    arms: &mut ArmSet<A>,
    config: &SelectionConfig,
) -> Result<SelectionResult, BanditError> {
    config.validate()?;
    let n = arms.len();
    let schedule = config.schedule(n)?;
    let epsilon = config.epsilon();

    let mut estimates = Vec::with_capacity(n);
    let mut counts = Vec::with_capacity(n);
    let mut beta_lo = Vec::with_capacity(n);
    let mut beta_hi = Vec::with_capacity(n);
    let mut total = 0u64;
    for (i, arm) in arms.arms_mut().iter_mut().enumerate() {
        match estimate_mean(arm, epsilon, &schedule, config.cap) {
            Ok(est) => {
                total += est.stopping_time;
                estimates.push(est.value);
                counts.push(est.stopping_time);
                beta_lo.push(est.mean_at_stop - est.achieved_half_width);
                beta_hi.push(est.mean_at_stop + est.achieved_half_width);
            }
            Err(EstimateError::CapExceeded { partial }) => {
                return Err(BanditError::CapExceeded {
                    arm: i,
                    partial,
                    total_samples: total + partial.count(),
                });
            }
            Err(EstimateError::Domain(e)) => return Err(e.into()),
            Err(other) => unreachable!("configuration validated up front: {other}"),
        }
    }
    let chosen = super::argmax_by(0..n, |i| estimates[i]).expect("non-empty arm set");
    Ok(SelectionResult {
        chosen,
        estimates,
        counts,
        total_samples: total,
        iterations: 0,
        beta_lo,
        beta_hi,
        active: (0..n).collect(),
        history: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arms::{ArmDistribution, SeededArm};
    use crate::concentration::{Range, Schedule};

    fn degenerate_set(values: &[f64], a: f64, b: f64) -> ArmSet<SeededArm> {
        let r = Range::new(a, b).unwrap();
        let arms = values
            .iter()
            .map(|&value| SeededArm::new(ArmDistribution::Degenerate { value }, r, 0))
            .collect();
        ArmSet::new(arms).unwrap()
    }

    /// First m with 3 * width * ln(3 / d_m) / m <= eps * |v|.
    fn closed_form_stop(v: f64, width: f64, eps: f64, schedule: &Schedule) -> u64 {
        (1u64..)
            .find(|&m| {
                3.0 * width * (3.0 / schedule.dm(m).unwrap()).ln() / m as f64 <= eps * v.abs()
            })
            .unwrap()
    }

    #[test]
    fn two_degenerate_arms() {
        let mut set = degenerate_set(&[1.0, 0.5], 0.0, 2.0);
        let cfg = SelectionConfig::new(0.1, 0.1);
        let res = nonadaptive_maximize(&mut set, &cfg).unwrap();
        assert_eq!(res.chosen, 0);
        let s = Schedule::new(0.05, 2.0).unwrap();
        let eps = cfg.epsilon();
        assert_eq!(
            res.counts,
            vec![
                closed_form_stop(1.0, 2.0, eps, &s),
                closed_form_stop(0.5, 2.0, eps, &s)
            ]
        );
        assert_eq!(res.total_samples, res.counts.iter().sum::<u64>());
    }

    #[test]
    fn cap_names_offending_arm() {
        let mut set = degenerate_set(&[1.0, 0.0, 0.5], -1.0, 2.0);
        let mut cfg = SelectionConfig::new(0.1, 0.1);
        cfg.cap = 50_000;
        match nonadaptive_maximize(&mut set, &cfg) {
            Err(BanditError::CapExceeded { arm, partial, .. }) => {
                assert_eq!(arm, 1);
                assert_eq!(partial.count(), 50_000);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_invalid_tau() {
        let mut set = degenerate_set(&[1.0], 0.0, 2.0);
        let cfg = SelectionConfig::new(1.5, 0.1);
        assert!(matches!(
            nonadaptive_maximize(&mut set, &cfg),
            Err(BanditError::OutOfUnitInterval { name: "tau", .. })
        ));
    }
}

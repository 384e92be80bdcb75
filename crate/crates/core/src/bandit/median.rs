use super::{check_unit, ArmSet, BanditError, SelectionResult};
use crate::arms::ArmOracle;
use crate::concentration::{RunningStats, Schedule, DEFAULT_EXPONENT};

/// Median Elimination for absolute precision `eps_abs` at confidence `delta`.
///
/// Round `l` draws `ceil((4 / e_l^2) ln(3 / d_l))` fresh samples from every
/// surviving arm and keeps the better half by round mean, starting from
/// `e_1 = eps / 4`, `d_1 = delta / 2` and shrinking by 3/4 and 1/2. Samples
/// are measured in units of `max(1, widest arm range)`, so arms whose ranges
/// are at most one wide are used as they are.
///
/// `cap` bounds the cumulative draws per arm.
pub fn median_elimination<A: ArmOracle>(
    arms: &mut ArmSet<A>,
    eps_abs: f64,
    delta: f64,
    cap: u64,
) -> Result<SelectionResult, BanditError> {
    if !(eps_abs > 0.0 && eps_abs.is_finite()) {
        return Err(BanditError::InvalidPrecision(eps_abs));
    }
    check_unit("delta", delta)?;
    if cap == 0 {
        return Err(BanditError::ZeroCap);
    }
    let n = arms.len();
    let ranges: Vec<_> = arms.arms().iter().map(|a| a.range()).collect();
    let scale = ranges.iter().map(|r| r.width()).fold(1.0, f64::max);

    let mut eps = eps_abs / scale / 4.0;
    let mut conf = delta / 2.0;
    let mut survivors: Vec<usize> = (0..n).collect();
    let mut overall = vec![RunningStats::new(); n];
    let mut round_means = vec![f64::NAN; n];
    let mut total = 0u64;
    let mut rounds = 0u64;

    while survivors.len() > 1 {
        let per_arm = ((4.0 / (eps * eps)) * (3.0 / conf).ln()).ceil();
        for &i in &survivors {
            let have = overall[i].count();
            if per_arm >= (cap - have) as f64 + 1.0 {
                return Err(BanditError::CapExceeded {
                    arm: i,
                    partial: overall[i],
                    total_samples: total,
                });
            }
            let draws = per_arm as u64;
            let arm = &mut arms.arms_mut()[i];
            let mut sum = 0.0;
            for _ in 0..draws {
                let x = arm.draw();
                sum += x;
                overall[i].push(x);
            }
            total += draws;
            round_means[i] = sum / draws as f64;
        }
        // Ranking by raw means equals ranking by rescaled means.
        survivors.sort_by(|&a, &b| round_means[b].total_cmp(&round_means[a]).then(a.cmp(&b)));
        survivors.truncate(survivors.len().div_ceil(2));
        survivors.sort_unstable();
        eps *= 0.75;
        conf *= 0.5;
        rounds += 1;
    }

    let chosen = survivors[0];
    // Bernstein intervals on the cumulative draws, for reporting only.
    let schedule = Schedule::new(delta / n as f64, DEFAULT_EXPONENT)?;
    let (beta_lo, beta_hi) = overall
        .iter()
        .zip(&ranges)
        .map(|(s, r)| match s.half_width(r, &schedule) {
            Ok(c) => (s.mean() - c, s.mean() + c),
            Err(_) => (f64::NEG_INFINITY, f64::INFINITY),
        })
        .unzip();
    Ok(SelectionResult {
        chosen,
        estimates: round_means,
        counts: overall.iter().map(RunningStats::count).collect(),
        total_samples: total,
        iterations: rounds,
        beta_lo,
        beta_hi,
        active: survivors,
        history: None,
    })
}

use relpac::arms::derive_seed;
use relpac::bandit::{
    adaptive_maximize, nonadaptive_maximize, ucbv_maximize, ArmSet, SelectionConfig,
};
use relpac::harness::{toy_arms, Problem, ToySpec};

fn toy() -> Problem {
    toy_arms(&ToySpec::default()).unwrap()
}

#[test]
fn best_arm_stays_active_whenever_every_interval_covers() {
    let p = toy();
    let means = p.oracle_means();
    let best = p.best_index();
    let mut cfg = SelectionConfig::new(0.1, 0.1);
    cfg.record_history = true;
    let mut conditioned = 0;
    for r in 0..40 {
        let mut set = p.arm_set(derive_seed(5, r));
        let res = adaptive_maximize(&mut set, &cfg).unwrap();
        let history = res.history.unwrap();
        let covered = history.iter().all(|rec| {
            (0..means.len()).all(|i| rec.beta_lo[i] <= means[i] && means[i] <= rec.beta_hi[i])
        });
        if covered {
            conditioned += 1;
            for (n, rec) in history.iter().enumerate() {
                assert!(rec.active.contains(&best), "run {r}, iteration {n}");
            }
        }
    }
    assert!(
        conditioned >= 30,
        "only {conditioned} runs had every interval covering"
    );
}

#[test]
fn stopping_through_precision_respects_the_threshold() {
    let p = toy();
    let cfg = SelectionConfig::new(0.1, 0.1);
    for r in 0..10 {
        let mut set = p.arm_set(derive_seed(6, r));
        let res = adaptive_maximize(&mut set, &cfg).unwrap();
        if res.active.len() > 1 {
            for &i in &res.active {
                let mean = res.beta_lo[i] / 2.0 + res.beta_hi[i] / 2.0;
                let c = (res.beta_hi[i] - res.beta_lo[i]) / 2.0;
                assert!(c / mean.abs() <= cfg.epsilon() * (1.0 + 1e-9));
            }
        }
        assert_eq!(res.total_samples, res.counts.iter().sum::<u64>());
        let best_estimate = res
            .active
            .iter()
            .map(|&i| res.estimates[i])
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(res.estimates[res.chosen], best_estimate);
    }
}

#[test]
fn adaptive_selection_is_relative_pac_on_the_toy_grid() {
    let p = toy();
    let cfg = SelectionConfig::new(0.1, 0.1);
    let ok = (0..100)
        .filter(|&r| {
            let res = adaptive_maximize(&mut p.arm_set(derive_seed(7, r)), &cfg).unwrap();
            p.is_relative_pac(res.chosen, 0.1)
        })
        .count();
    assert!(ok >= 90, "{ok}/100");
}

#[test]
fn ucbv_spends_almost_everything_on_the_top_two_arms() {
    let p = toy()
        .subset(&(0..=100).step_by(10).collect::<Vec<_>>())
        .unwrap();
    let mut order: Vec<usize> = (0..p.len()).collect();
    let means = p.oracle_means();
    order.sort_by(|&a, &b| means[b].total_cmp(&means[a]));
    let cfg = SelectionConfig::new(0.1, 0.1);
    let (mut top, mut all) = (0u64, 0u64);
    for r in 0..10 {
        let res = ucbv_maximize(&mut p.arm_set(derive_seed(8, r)), &cfg).unwrap();
        top += res.counts[order[0]] + res.counts[order[1]];
        all += res.total_samples;
    }
    assert!(top as f64 / all as f64 > 0.9, "{top} of {all}");
}

#[test]
fn nonadaptive_heaviest_arm_is_near_zero_mean_on_a_small_grid() {
    // Arms 68..=72 bracket the grid's smallest |f| (index 70).
    let p = toy().subset(&[60, 68, 70, 72, 80]).unwrap();
    let res = nonadaptive_maximize(&mut p.arm_set(11), &SelectionConfig::new(0.1, 0.1)).unwrap();
    let heaviest = (0..p.len()).max_by_key(|&i| res.counts[i]).unwrap();
    assert_eq!(heaviest, 2);
    assert_eq!(res.chosen, 4);
}

#[test]
fn selections_are_reproducible() {
    let p = toy();
    let mut cfg = SelectionConfig::new(0.2, 0.1);
    cfg.record_history = true;
    let a = adaptive_maximize(&mut p.arm_set(12), &cfg).unwrap();
    let b = adaptive_maximize(&mut p.arm_set(12), &cfg).unwrap();
    assert_eq!(a, b);
    let sub = p.subset(&[0, 40, 80]).unwrap();
    let a = ucbv_maximize(&mut sub.arm_set(13), &cfg).unwrap();
    let b = ucbv_maximize(&mut ArmSet::new(sub.instantiate(13)).unwrap(), &cfg).unwrap();
    assert_eq!(a, b);
}

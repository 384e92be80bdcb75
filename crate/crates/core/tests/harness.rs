use std::hint::black_box;
use std::time::Instant;

use relpac::arms::SeededArm;
use relpac::concentration::Range;
use relpac::harness::{
    run_on_arms, run_once, sweep, toy_arms, toy_function, verify_pac, write_profile_csv,
    write_runs_csv, write_sweep_csv, Algorithm, Problem, RunConfig, SweepGrid, ToySpec,
    PROFILE_HEADER, RUNS_HEADER, SWEEP_HEADER,
};
use relpac::ArmOracle;

fn toy() -> Problem {
    toy_arms(&ToySpec::default()).unwrap()
}

fn quiet(tau: f64, lambda: f64) -> RunConfig {
    RunConfig {
        measure_time: false,
        ..RunConfig::new(tau, lambda)
    }
}

/// Burns a fixed amount of arithmetic on every draw.
struct Slow {
    inner: SeededArm,
    work: u64,
}

impl ArmOracle for Slow {
    fn range(&self) -> Range {
        self.inner.range()
    }

    fn draw(&mut self) -> f64 {
        let mut z = 1u64;
        for _ in 0..self.work {
            z = black_box(z.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1));
        }
        black_box(z);
        self.inner.draw()
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

// UCB-V spends a few hundred nanoseconds of its own per draw, well above the
// clock's resolution; Algorithm 2 spends about fifty.
#[test]
fn overhead_measurement_excludes_sampler_time() {
    let p = toy();
    let cfg = RunConfig::new(0.9, 0.1);
    let alg = Algorithm::UcbV;
    let expected_m = run_once(alg, &p, &quiet(0.9, 0.1), 3).total_samples;
    let (mut plain, mut slowed) = (Vec::new(), Vec::new());
    // Alternate the two so drift in machine load hits both alike.
    for _ in 0..9 {
        plain.push(run_once(alg, &p, &cfg, 3).wall_other);
        let arms = p
            .instantiate(3)
            .into_iter()
            .map(|inner| Slow { inner, work: 1000 })
            .collect();
        let start = Instant::now();
        let r = run_on_arms(alg, &p, arms, &cfg, 3);
        assert_eq!(r.total_samples, expected_m);
        // The injected cost must dominate the run for the check to mean anything.
        assert!(start.elapsed().as_secs_f64() > 2.0 * r.wall_other);
        slowed.push(r.wall_other);
    }
    let (a, b) = (median(plain), median(slowed));
    assert!(
        (b - a).abs() <= 0.2 * a,
        "plain {a:e} s, slowed {b:e} s over {expected_m} draws"
    );
}

#[test]
fn lambda_barely_moves_the_mean_complexity() {
    let rows = sweep(
        &SweepGrid {
            taus: vec![0.1],
            lambdas: vec![0.2, 0.05],
            reps: 10,
            algorithm: Algorithm::Adaptive,
        },
        &toy(),
        &quiet(0.1, 0.1),
        1,
    )
    .unwrap();
    let ratio = rows[1].mean_m / rows[0].mean_m;
    assert!(ratio > 1.0 && ratio < 2.0, "{ratio}");
}

#[test]
fn complexity_decreases_in_tau() {
    let rows = sweep(
        &SweepGrid {
            taus: vec![0.4, 0.2, 0.1, 0.05],
            lambdas: vec![0.1],
            reps: 10,
            algorithm: Algorithm::Adaptive,
        },
        &toy(),
        &quiet(0.1, 0.1),
        2,
    )
    .unwrap();
    assert!(rows.windows(2).all(|w| w[0].mean_m < w[1].mean_m));
    assert!(rows.iter().all(|r| r.success_rate == 1.0 && r.reps == 10));
}

#[test]
fn toy_oracle_means_are_the_noise_free_function() {
    let p = toy();
    let grid = ToySpec::default().grid();
    for (i, xi) in grid.iter().enumerate() {
        assert_eq!(p.oracle_means()[i], toy_function(*xi));
        assert_eq!(p.label(i), Some(*xi));
        let r = p.specs()[i].range;
        assert!((r.width() - 0.1).abs() < 1e-12);
    }
    assert_eq!(p.best_index(), 80);
    assert!((p.best_mean() - 0.886).abs() < 1e-3);
}

fn parse_f64(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn csv_rows_round_trip() {
    let p = toy().subset(&[0, 40, 80, 81]).unwrap();
    let summary = verify_pac(Algorithm::Adaptive, &p, &RunConfig::new(0.1, 0.1), 5, 21).unwrap();

    let mut buf = Vec::new();
    write_runs_csv(&mut buf, &summary.reports).unwrap();
    let mut rdr = csv::Reader::from_reader(buf.as_slice());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>().join(","),
        RUNS_HEADER
    );
    let records: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 5);
    for (rec, rep) in records.iter().zip(&summary.reports) {
        assert_eq!(&rec[0], "adaptive");
        assert_eq!(rec[1].parse::<u64>().unwrap(), rep.seed);
        assert_eq!(parse_f64(&rec[2]), rep.tau);
        assert_eq!(parse_f64(&rec[3]), rep.lambda);
        assert_eq!(parse_f64(&rec[4]), rep.p);
        assert_eq!(rec[5].parse::<usize>().ok(), rep.chosen_index);
        assert_eq!(rec[6].parse::<f64>().ok(), rep.chosen_xi);
        assert_eq!(rec[7].parse::<u64>().unwrap(), rep.total_samples);
        assert_eq!(parse_f64(&rec[8]), rep.wall_other);
        assert_eq!(rec[9].parse::<bool>().unwrap(), rep.success);
        assert_eq!(rec[10].parse::<u64>().unwrap(), rep.iterations);
    }

    let report = &summary.reports[0];
    let sel = report.selection.as_ref().unwrap();
    let mut buf = Vec::new();
    write_profile_csv(&mut buf, &p, report).unwrap();
    let mut rdr = csv::Reader::from_reader(buf.as_slice());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>().join(","),
        PROFILE_HEADER
    );
    for (i, rec) in rdr.records().map(Result::unwrap).enumerate() {
        assert_eq!(rec[0].parse::<usize>().unwrap(), i);
        assert_eq!(rec[1].parse::<f64>().ok(), p.label(i));
        assert_eq!(parse_f64(&rec[2]), p.oracle_means()[i]);
        assert_eq!(rec[3].parse::<u64>().unwrap(), sel.counts[i]);
        assert_eq!(parse_f64(&rec[4]).to_bits(), sel.estimates[i].to_bits());
        assert_eq!(parse_f64(&rec[5]), sel.beta_lo[i]);
        assert_eq!(parse_f64(&rec[6]), sel.beta_hi[i]);
    }

    let grid = SweepGrid {
        taus: vec![0.3, 0.15],
        lambdas: vec![0.1],
        reps: 3,
        algorithm: Algorithm::UcbV,
    };
    let rows = sweep(&grid, &p, &quiet(0.1, 0.1), 4).unwrap();
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &rows).unwrap();
    let mut rdr = csv::Reader::from_reader(buf.as_slice());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>().join(","),
        SWEEP_HEADER
    );
    for (rec, row) in rdr.records().map(Result::unwrap).zip(&rows) {
        assert_eq!(&rec[0], "ucbv");
        assert_eq!(parse_f64(&rec[1]), row.tau);
        assert_eq!(parse_f64(&rec[2]), row.lambda);
        assert_eq!(rec[3].parse::<usize>().unwrap(), row.reps);
        assert_eq!(parse_f64(&rec[4]), row.mean_m);
        assert_eq!(parse_f64(&rec[5]), row.std_m);
        assert_eq!(parse_f64(&rec[6]), row.success_rate);
    }
}

#[test]
fn rerunning_a_cell_reproduces_its_bytes() {
    let p = toy();
    let grid = SweepGrid {
        taus: vec![0.2],
        lambdas: vec![0.1, 0.05],
        reps: 4,
        algorithm: Algorithm::Adaptive,
    };
    let emit = || {
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &sweep(&grid, &p, &quiet(0.1, 0.1), 9).unwrap()).unwrap();
        let mut runs = Vec::new();
        write_runs_csv(
            &mut runs,
            &verify_pac(Algorithm::Adaptive, &p, &quiet(0.2, 0.1), 4, 9)
                .unwrap()
                .reports,
        )
        .unwrap();
        (buf, runs)
    };
    assert_eq!(emit(), emit());
}

#[test]
fn oracle_decides_success_not_the_estimates() {
    let p = toy();
    let cfg = quiet(0.1, 0.1);
    for seed in 0..5 {
        let r = run_once(Algorithm::Adaptive, &p, &cfg, seed);
        let chosen = r.chosen_index.unwrap();
        let gap = p.best_mean() - p.oracle_means()[chosen];
        assert_eq!(r.success, gap <= 0.1 * p.best_mean().abs());
        assert_eq!(r.chosen_xi, p.label(chosen));
    }
}

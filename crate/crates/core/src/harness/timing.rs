use std::hint::black_box;
use std::sync::OnceLock;
use std::time::Instant;

use crate::arms::ArmOracle;
use crate::concentration::Range;

/// One draw in `STRIDE` is timed.
const STRIDE: u64 = 16;

#[derive(Debug, Clone, Copy)]
struct ClockCost {
    /// Median interval reported for an empty timed section.
    inside: f64,
    /// Full cost of timing an empty section.
    total: f64,
}

fn clock_cost() -> ClockCost {
    static COST: OnceLock<ClockCost> = OnceLock::new();
    *COST.get_or_init(|| {
        let mut samples: Vec<u128> = (0..4001)
            .map(|_| {
                let t = Instant::now();
                t.elapsed().as_nanos()
            })
            .collect();
        samples.sort_unstable();
        let inside = samples[samples.len() / 2] as f64;
        let mut runs: Vec<f64> = (0..9)
            .map(|_| {
                let n = 20_000u32;
                let start = Instant::now();
                let mut acc = 0u128;
                for _ in 0..n {
                    let t = Instant::now();
                    acc += black_box(t.elapsed().as_nanos());
                }
                black_box(acc);
                start.elapsed().as_nanos() as f64 / n as f64
            })
            .collect();
        runs.sort_by(f64::total_cmp);
        ClockCost {
            inside,
            total: runs[runs.len() / 2].max(inside),
        }
    })
}

/// Median latency of an `Instant::now()` pair, measured once per process.
pub fn clock_overhead_nanos() -> f64 {
    clock_cost().inside
}

/// Wraps an arm and estimates the time spent inside its sampler.
///
/// Timing every draw would cost more than the toy samplers themselves, so
/// every `STRIDE`-th draw is timed and the mean net cost is extrapolated to
/// the rest.
#[derive(Debug, Clone)]
pub struct TimedArm<A> {
    inner: A,
    enabled: bool,
    draws: u64,
    timed_draws: u64,
    timed_nanos: u128,
}

impl<A: ArmOracle> TimedArm<A> {
    pub fn new(inner: A, enabled: bool) -> Self {
        Self {
            inner,
            enabled,
            draws: 0,
            timed_draws: 0,
            timed_nanos: 0,
        }
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    fn net_timed_nanos(&self) -> f64 {
        (self.timed_nanos as f64 - self.timed_draws as f64 * clock_cost().inside).max(0.0)
    }

    /// Estimated seconds spent in the wrapped sampler so far.
    pub fn sampler_seconds(&self) -> f64 {
        if self.timed_draws == 0 {
            return 0.0;
        }
        let net = self.net_timed_nanos();
        let untimed = (self.draws - self.timed_draws) as f64 * net / self.timed_draws as f64;
        (net + untimed) * 1e-9
    }

    /// Seconds spent reading the clock on behalf of this arm.
    pub fn instrumentation_seconds(&self) -> f64 {
        self.timed_draws as f64 * clock_cost().total * 1e-9
    }

    pub fn into_inner(self) -> A {
        self.inner
    }
}

impl<A: ArmOracle> ArmOracle for TimedArm<A> {
    fn range(&self) -> Range {
        self.inner.range()
    }

    #[inline]
    fn draw(&mut self) -> f64 {
        let timed = self.enabled && self.draws.is_multiple_of(STRIDE);
        self.draws += 1;
        if timed {
            let t = Instant::now();
            let x = self.inner.draw();
            self.timed_nanos += t.elapsed().as_nanos();
            self.timed_draws += 1;
            x
        } else {
            self.inner.draw()
        }
    }
}

//! The `relpac` command line.
//!
//! Data commands write CSV (to stdout, or to `--out`); `bound` writes
//! `key=value` lines. Exit codes: 0 on success, 2 on a configuration error,
//! 3 when a sample cap was hit.

mod format;
mod problem_file;

pub use format::{format_g, format_g_with};
pub use problem_file::{load_problem, parse_problem, ProblemFileError};

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::arms::derive_seed;
use crate::bandit::{BanditError, SelectionConfig};
use crate::concentration::{Range, Schedule};
use crate::estimator::{complexity_bound, estimate_mean, EstimateError, DEFAULT_CAP};
use crate::harness::{
    run_once, sweep, toy_arms, verify_pac, write_profile_csv, write_runs_csv, write_sweep_csv,
    Algorithm, HarnessError, Problem, RunConfig, RunReport, SweepGrid, ToySpec,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CAP: i32 = 3;

pub const ESTIMATE_HEADER: &str = "arm_index,seed,estimate,stopping_time,half_width,mean,variance";
pub const VERIFY_HEADER: &str =
    "algorithm,tau,lambda,reps,mean_M,std_M,success_rate,failures,mean_wall_other_s,t_star,mean_T";

#[derive(Debug, Parser)]
#[command(
    name = "relpac",
    version,
    about = "Best-arm identification in relative precision"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate one arm's mean to relative precision.
    Estimate(EstimateArgs),
    /// Run one selection and write a runs.csv row.
    Run(RunArgs),
    /// Sweep tau and lambda, one sweep.csv row per cell.
    Sweep(SweepArgs),
    /// Replicate a selection and report the oracle-checked success rate.
    Verify(VerifyArgs),
    /// Print the stopping-time bound of the estimator.
    Bound(BoundArgs),
    /// Run one selection and write the per-arm final state.
    Profile(RunArgs),
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// `toy`, or the path of a problem file.
    #[arg(long, default_value = "toy")]
    problem: String,
    /// Keep only these arm indices, e.g. `0,10,20`.
    #[arg(long, value_delimiter = ',')]
    arms: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[arg(long = "alg", default_value = "adaptive", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[arg(long, conflicts_with = "epsilon")]
    tau: Option<f64>,
    /// Working precision; sets tau to 2e/(1-e), or 2e/(1+e) with --positive-means.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Per-arm sample cap.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
    #[arg(long, default_value_t = 1)]
    batch_size: u64,
    #[arg(long)]
    positive_means: bool,
    /// Measure non-sampling time; without it wall_other_s is 0 and output is reproducible.
    #[arg(long)]
    measure_time: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    select: SelectArgs,
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    select: SelectArgs,
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    out: OutArgs,
    #[arg(long, default_value_t = 200)]
    reps: usize,
    /// Per-sample cost used for mean_T.
    #[arg(long, default_value_t = 0.0)]
    t_star: f64,
    /// Also write one runs.csv row per replication to this file.
    #[arg(long)]
    runs_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long = "alg", default_value = "adaptive", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[arg(long, value_delimiter = ',', required = true)]
    taus: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    lambdas: Vec<f64>,
    #[arg(long, default_value_t = 30)]
    reps: usize,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
    #[arg(long, default_value_t = 1)]
    batch_size: u64,
    #[arg(long)]
    positive_means: bool,
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
    /// Arm to estimate; defaults to the best arm of the problem.
    #[arg(long)]
    arm: Option<usize>,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long, default_value_t = 0.0)]
    sigma2: f64,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

enum Failure {
    Config(String),
    Cap(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Bandit(b) => b.into(),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<BanditError> for Failure {
    fn from(e: BanditError) -> Self {
        match e {
            BanditError::CapExceeded { .. } => Failure::Cap(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<EstimateError> for Failure {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::CapExceeded { .. } => Failure::Cap(e.to_string()),
            other => Failure::Config(other.to_string()),
        }
    }
}

impl From<ProblemFileError> for Failure {
    fn from(e: ProblemFileError) -> Self {
        Failure::Config(e.to_string())
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn parse_and_dispatch<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                EXIT_CONFIG
            } else {
                let _ = write!(stdout, "{rendered}");
                EXIT_OK
            };
        }
    };
    if let Err(message) = configure_threads() {
        let _ = writeln!(stderr, "relpac: {message}");
        return EXIT_CONFIG;
    }
    let outcome = match cli.command {
        Command::Estimate(args) => cmd_estimate(args, stdout),
        Command::Run(args) => cmd_run(args, stdout, false),
        Command::Profile(args) => cmd_run(args, stdout, true),
        Command::Sweep(args) => cmd_sweep(args, stdout),
        Command::Verify(args) => cmd_verify(args, stdout),
        Command::Bound(args) => cmd_bound(args, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Config(m)) => {
            let _ = writeln!(stderr, "relpac: configuration error: {m}");
            EXIT_CONFIG
        }
        Err(Failure::Cap(m)) => {
            let _ = writeln!(stderr, "relpac: {m}");
            EXIT_CAP
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(stderr, "relpac: {e}");
            EXIT_IO
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("RELPAC_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("RELPAC_THREADS must be a positive integer, got '{value}'"))?;
    // A pool that already exists (a second call in one process) is kept.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn with_output(
    out: &OutArgs,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), Failure> {
    match &out.out {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            body(&mut file)?;
            file.flush()?;
        }
        None => body(stdout)?,
    }
    Ok(())
}

fn load(args: &ProblemArgs) -> Result<Problem, Failure> {
    let problem = if args.problem == "toy" {
        toy_arms(&ToySpec::default())?
    } else {
        load_problem(args.problem.as_ref())?
    };
    match &args.arms {
        Some(indices) => Ok(problem.subset(indices)?),
        None => Ok(problem),
    }
}

fn run_config(args: &SelectArgs) -> Result<RunConfig, Failure> {
    let tau = match (args.tau, args.epsilon) {
        (Some(tau), _) => tau,
        (None, Some(eps)) => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Failure::Config(format!(
                    "epsilon = {eps} is outside (0, 1)"
                )));
            }
            if args.positive_means {
                2.0 * eps / (1.0 + eps)
            } else {
                2.0 * eps / (1.0 - eps)
            }
        }
        (None, None) => 0.1,
    };
    let selection = SelectionConfig {
        tau,
        lambda: args.lambda,
        p: args.p,
        positive_means: args.positive_means,
        batch_size: args.batch_size,
        cap: args.cap,
        record_history: false,
    };
    selection.validate()?;
    Ok(RunConfig {
        selection,
        measure_time: args.measure_time,
    })
}

fn cap_failure(reports: &[RunReport]) -> Option<Failure> {
    reports.iter().find_map(|r| match &r.error {
        Some(e @ BanditError::CapExceeded { .. }) => {
            Some(Failure::Cap(format!("seed {}: {e}", r.seed)))
        }
        _ => None,
    })
}

fn cmd_run(args: RunArgs, stdout: &mut dyn Write, profile: bool) -> Result<(), Failure> {
    let config = run_config(&args.select)?;
    let problem = load(&args.problem)?;
    let report = run_once(args.select.algorithm, &problem, &config, args.select.seed);
    if let Some(e) = &report.error {
        if !matches!(e, BanditError::CapExceeded { .. }) {
            return Err(e.clone().into());
        }
    }
    with_output(&args.out, stdout, |w| {
        if profile {
            write_profile_csv(w, &problem, &report)
        } else {
            write_runs_csv(w, std::slice::from_ref(&report))
        }
    })?;
    cap_failure(std::slice::from_ref(&report)).map_or(Ok(()), Err)
}

fn cmd_verify(args: VerifyArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let config = run_config(&args.select)?;
    if !(args.t_star >= 0.0 && args.t_star.is_finite()) {
        return Err(Failure::Config(format!(
            "t_star = {} must be nonnegative",
            args.t_star
        )));
    }
    let problem = load(&args.problem)?;
    let summary = verify_pac(
        args.select.algorithm,
        &problem,
        &config,
        args.reps,
        args.select.seed,
    )?;
    if let Some(path) = &args.runs_out {
        let mut file = BufWriter::new(File::create(path)?);
        write_runs_csv(&mut file, &summary.reports)?;
        file.flush()?;
    }
    let sel = config.selection;
    with_output(&args.out, stdout, |w| {
        writeln!(w, "{VERIFY_HEADER}")?;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            args.select.algorithm,
            sel.tau,
            sel.lambda,
            args.reps,
            summary.mean_m,
            summary.std_m,
            summary.success_rate,
            summary.failures,
            summary.mean_wall_other,
            args.t_star,
            summary.mean_runtime(args.t_star)
        )
    })?;
    cap_failure(&summary.reports).map_or(Ok(()), Err)
}

fn cmd_sweep(args: SweepArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let problem = load(&args.problem)?;
    let grid = SweepGrid {
        taus: args.taus,
        lambdas: args.lambdas,
        reps: args.reps,
        algorithm: args.algorithm,
    };
    let base = RunConfig {
        selection: SelectionConfig {
            p: args.p,
            positive_means: args.positive_means,
            batch_size: args.batch_size,
            cap: args.cap,
            ..SelectionConfig::default()
        },
        measure_time: false,
    };
    let rows = sweep(&grid, &problem, &base, args.seed)?;
    with_output(&args.out, stdout, |w| write_sweep_csv(w, &rows))?;
    if rows.iter().any(|r| r.failures > 0) {
        return Err(Failure::Cap(
            "at least one replication hit the sample cap".into(),
        ));
    }
    Ok(())
}

fn cmd_estimate(args: EstimateArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let schedule = Schedule::new(args.delta, args.p).map_err(|e| Failure::Config(e.to_string()))?;
    if !(args.epsilon > 0.0 && args.epsilon < 1.0) {
        return Err(Failure::Config(format!(
            "epsilon = {} is outside (0, 1)",
            args.epsilon
        )));
    }
    if args.reps == 0 || args.cap == 0 {
        return Err(Failure::Config("reps and cap must be at least 1".into()));
    }
    let problem = load(&args.problem)?;
    let arm = args.arm.unwrap_or_else(|| problem.best_index());
    let spec = problem.specs().get(arm).ok_or_else(|| {
        Failure::Config(format!(
            "arm index {arm} out of bounds ({} arms)",
            problem.len()
        ))
    })?;

    let mut rows = Vec::with_capacity(args.reps);
    let mut cap_error = None;
    for r in 0..args.reps {
        let seed = derive_seed(args.seed, r as u64);
        let mut oracle = spec.seeded(derive_seed(seed, arm as u64));
        match estimate_mean(&mut oracle, args.epsilon, &schedule, args.cap) {
            Ok(e) => rows.push(format!(
                "{arm},{seed},{},{},{},{},{}",
                e.value, e.stopping_time, e.achieved_half_width, e.mean_at_stop, e.variance_at_stop
            )),
            Err(e @ EstimateError::CapExceeded { .. }) => {
                rows.push(format!("{arm},{seed},,{},,,", args.cap));
                cap_error.get_or_insert(Failure::Cap(format!("seed {seed}: {e}")));
            }
            Err(e) => return Err(e.into()),
        }
    }
    with_output(&args.out, stdout, |w| {
        writeln!(w, "{ESTIMATE_HEADER}")?;
        rows.iter().try_for_each(|row| writeln!(w, "{row}"))
    })?;
    cap_error.map_or(Ok(()), Err)
}

fn cmd_bound(args: BoundArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let range = Range::new(args.a, args.b).map_err(|e| Failure::Config(e.to_string()))?;
    let schedule = Schedule::new(args.delta, args.p).map_err(|e| Failure::Config(e.to_string()))?;
    let bound = complexity_bound(args.mu, args.sigma2, args.epsilon, &schedule, &range)?;
    writeln!(stdout, "nu={}", format_g(bound.nu))?;
    writeln!(stdout, "gamma={}", format_g(bound.gamma))?;
    writeln!(stdout, "K={}", bound.k)?;
    writeln!(
        stdout,
        "expected_M_bound={}",
        format_g(bound.expected_m_bound)
    )?;
    writeln!(
        stdout,
        "tail_probability={}",
        format_g(bound.tail_probability)
    )?;
    Ok(())
}

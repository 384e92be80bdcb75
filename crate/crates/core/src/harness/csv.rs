use std::io::{self, Write};

use super::{Problem, RunReport, SweepRow};

pub const RUNS_HEADER: &str =
    "algorithm,seed,tau,lambda,p,chosen_index,chosen_xi,total_samples,wall_other_s,success,iterations";
pub const PROFILE_HEADER: &str = "arm_index,xi,true_mean,count,estimate,beta_lo,beta_hi";
pub const SWEEP_HEADER: &str = "algorithm,tau,lambda,reps,mean_M,std_M,success_rate";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per run. Missing choices are written as empty fields.
pub fn write_runs_csv<W: Write + ?Sized>(out: &mut W, reports: &[RunReport]) -> io::Result<()> {
    writeln!(out, "{RUNS_HEADER}")?;
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.algorithm,
            r.seed,
            r.tau,
            r.lambda,
            r.p,
            opt(r.chosen_index),
            opt(r.chosen_xi),
            r.total_samples,
            r.wall_other,
            r.success,
            r.iterations
        )?;
    }
    Ok(())
}

/// Per-arm profile of a single finished run.
pub fn write_profile_csv<W: Write + ?Sized>(
    out: &mut W,
    problem: &Problem,
    report: &RunReport,
) -> io::Result<()> {
    writeln!(out, "{PROFILE_HEADER}")?;
    let Some(sel) = &report.selection else {
        return Ok(());
    };
    for (i, spec) in problem.specs().iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            i,
            opt(spec.label),
            spec.true_mean,
            sel.counts[i],
            sel.estimates[i],
            sel.beta_lo[i],
            sel.beta_hi[i]
        )?;
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write + ?Sized>(out: &mut W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.algorithm, r.tau, r.lambda, r.reps, r.mean_m, r.std_m, r.success_rate
        )?;
    }
    Ok(())
}

//! DC-count sweep comparing the trajectory design with the static baseline.
//!
//! Output tables in the target directory:
//!
//! - `runs.csv`: one row per (DC count, seed) with both methods' means,
//!   standard deviations, the std reduction and the BCD status;
//! - `sweep.csv`: per-DC-count averages over seeds;
//! - `users.csv`: per-user mean pathloss of every run and method;
//! - `cdf.csv`: CDF of per-user mean pathloss per DC count and method,
//!   pooled over seeds.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use dctraj_core::baseline::{solve_static, static_as_trajectory, PsoOptions};
use dctraj_core::bcd::{self, BcdStatus};
use dctraj_core::metrics::{cdf, compare, hovering_fraction, summarize, ComparisonReport, UserPathlossSummary, HOVER_TOL};
use dctraj_core::model::{generate_scenario, validate_solution, ScenarioOverrides};
use dctraj_core::Result;

use crate::args::{BcdArgs, CompareArgs};
use crate::output::create;

pub const RUNS_FILE: &str = "runs.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const USERS_FILE: &str = "users.csv";
pub const CDF_FILE: &str = "cdf.csv";

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub users: usize,
    pub dcs: Vec<usize>,
    pub runs: u64,
    pub seed: u64,
    pub overrides: ScenarioOverrides,
    pub bcd: BcdArgs,
    pub pso: PsoOptions,
}

impl SweepConfig {
    pub fn from_args(a: &CompareArgs) -> Self {
        Self {
            users: a.users,
            dcs: a.dcs.clone(),
            runs: a.runs,
            seed: a.seed,
            overrides: a.overrides.to_overrides(),
            bcd: a.bcd.clone(),
            pso: a.pso.options(),
        }
    }
}

/// Both methods on one scenario.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub dcs: usize,
    pub seed: u64,
    pub status: BcdStatus,
    pub iterations: usize,
    pub trajectory: UserPathlossSummary,
    pub static_: UserPathlossSummary,
    pub report: ComparisonReport,
    /// Per-DC hovering fraction of the trajectory design.
    pub hovering: Vec<f64>,
    /// Constraint violations of either method's solution.
    pub violations: usize,
}

/// Averages over the seeds of one DC count.
#[derive(Debug, Clone, PartialEq)]
pub struct DcAggregate {
    pub dcs: usize,
    pub runs: usize,
    pub trajectory_mean: f64,
    pub static_mean: f64,
    /// `static_mean - trajectory_mean`, dB.
    pub gap: f64,
    pub trajectory_std: f64,
    pub static_std: f64,
    /// Mean of the per-run relative std reductions.
    pub std_reduction: f64,
    pub min_hovering: f64,
    pub converged: usize,
}

pub fn run_one(cfg: &SweepConfig, dcs: usize, seed: u64) -> Result<RunResult> {
    let s = generate_scenario(seed, cfg.users, dcs, &cfg.overrides)?;
    let out = bcd::solve(&s, &cfg.bcd.options(&s))?;
    let dep = solve_static(&s, &cfg.pso)?;
    let st = static_as_trajectory(&dep, &s, cfg.bcd.schedule_fill)?;
    let trajectory = summarize(&out.solution, &s)?;
    let static_ = summarize(&st, &s)?;
    let violations = validate_solution(&s, &out.solution).len() + validate_solution(&s, &st).len();
    log::info!("dcs {dcs} seed {seed}: {:?} after {} iterations", out.status, out.iterations);
    Ok(RunResult {
        dcs,
        seed,
        status: out.status,
        iterations: out.iterations,
        report: compare(&trajectory, &static_),
        hovering: hovering_fraction(&out.solution.trajectory, HOVER_TOL),
        trajectory,
        static_,
        violations,
    })
}

/// Runs every (DC count, seed) pair in parallel; results keep the order
/// of the DC list, then of the seeds.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<RunResult>> {
    let jobs: Vec<(usize, u64)> =
        cfg.dcs.iter().flat_map(|&d| (0..cfg.runs).map(move |i| (d, cfg.seed + i))).collect();
    jobs.par_iter().map(|&(d, seed)| run_one(cfg, d, seed)).collect()
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Per-DC-count averages in order of first appearance.
pub fn aggregate(runs: &[RunResult]) -> Vec<DcAggregate> {
    let mut counts: Vec<usize> = Vec::new();
    for r in runs {
        if !counts.contains(&r.dcs) {
            counts.push(r.dcs);
        }
    }
    counts
        .into_iter()
        .map(|dcs| {
            let group: Vec<&RunResult> = runs.iter().filter(|r| r.dcs == dcs).collect();
            DcAggregate {
                dcs,
                runs: group.len(),
                trajectory_mean: mean(group.iter().map(|r| r.trajectory.mean_per_user)),
                static_mean: mean(group.iter().map(|r| r.static_.mean_per_user)),
                gap: mean(group.iter().map(|r| r.report.mean_gap)),
                trajectory_std: mean(group.iter().map(|r| r.report.std_trajectory)),
                static_std: mean(group.iter().map(|r| r.report.std_static)),
                std_reduction: mean(group.iter().map(|r| r.report.std_reduction)),
                min_hovering: group.iter().flat_map(|r| r.hovering.iter().copied()).fold(f64::INFINITY, f64::min),
                converged: group.iter().filter(|r| r.status == BcdStatus::Converged).count(),
            }
        })
        .collect()
}

fn status_name(s: BcdStatus) -> &'static str {
    match s {
        BcdStatus::Converged => "converged",
        BcdStatus::MaxIterations => "max_iterations",
    }
}

pub fn write_sweep(dir: &Path, runs: &[RunResult], aggs: &[DcAggregate]) -> Result<()> {
    std::fs::create_dir_all(dir)?;

    let mut w = create(&dir.join(RUNS_FILE))?;
    writeln!(
        w,
        "dcs,seed,status,iterations,trajectory_mean_db,static_mean_db,gap_db,trajectory_slot_mean_db,static_slot_mean_db,trajectory_std_db,static_std_db,std_reduction,min_hovering,violations"
    )?;
    for r in runs {
        let hover = r.hovering.iter().copied().fold(f64::INFINITY, f64::min);
        writeln!(
            w,
            "{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
            r.dcs,
            r.seed,
            status_name(r.status),
            r.iterations,
            r.trajectory.mean_per_user,
            r.static_.mean_per_user,
            r.report.mean_gap,
            r.trajectory.mean_per_slot,
            r.static_.mean_per_slot,
            r.report.std_trajectory,
            r.report.std_static,
            r.report.std_reduction,
            hover,
            r.violations
        )?;
    }
    w.flush()?;

    let mut w = create(&dir.join(SWEEP_FILE))?;
    writeln!(
        w,
        "dcs,runs,converged,trajectory_mean_db,static_mean_db,gap_db,trajectory_std_db,static_std_db,std_reduction,min_hovering"
    )?;
    for g in aggs {
        writeln!(
            w,
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            g.dcs,
            g.runs,
            g.converged,
            g.trajectory_mean,
            g.static_mean,
            g.gap,
            g.trajectory_std,
            g.static_std,
            g.std_reduction,
            g.min_hovering
        )?;
    }
    w.flush()?;

    let mut w = create(&dir.join(USERS_FILE))?;
    writeln!(w, "dcs,seed,method,user,dc,slots,mean_pathloss_db")?;
    for r in runs {
        for (method, m) in [("trajectory", &r.trajectory), ("static", &r.static_)] {
            for (u, v) in m.per_user.iter().enumerate() {
                writeln!(w, "{},{},{method},{u},{},{},{v:.6}", r.dcs, r.seed, m.serving_dc[u], m.slots[u])?;
            }
        }
    }
    w.flush()?;

    let mut w = create(&dir.join(CDF_FILE))?;
    writeln!(w, "dcs,method,pathloss_db,fraction")?;
    for g in aggs {
        for method in ["trajectory", "static"] {
            let pooled: Vec<f64> = runs
                .iter()
                .filter(|r| r.dcs == g.dcs)
                .flat_map(|r| if method == "trajectory" { &r.trajectory } else { &r.static_ }.per_user.iter().copied())
                .collect();
            for p in cdf(&pooled) {
                writeln!(w, "{},{method},{:.3},{:.6}", g.dcs, p.pathloss_db, p.fraction)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

use dctraj_core::baseline::{solve_static, static_as_trajectory};
use dctraj_core::bcd::{self, BcdStatus};
use dctraj_core::metrics::{hovering_fraction, HOVER_TOL};
use dctraj_core::model::{generate_scenario, io, validate_solution, Scenario, Solution};
use dctraj_core::{Error, Result};

use crate::args::{BaselineArgs, CompareArgs, GenerateArgs, SolveArgs};
use crate::compare::{aggregate, run_sweep, write_sweep, SweepConfig};
use crate::output::{create, write_solution, ITERATIONS_FILE};
use crate::{EXIT_MAX_ITERATIONS, EXIT_OK};

pub fn generate(a: &GenerateArgs) -> Result<u8> {
    let s = generate_scenario(a.seed, a.users, a.dcs, &a.overrides.to_overrides())?;
    io::save_scenario(&a.output, &s)?;
    println!("{}", a.output.display());
    Ok(EXIT_OK)
}

fn check_feasible(s: &Scenario, sol: &Solution) -> Result<()> {
    let violations = validate_solution(s, sol);
    if let Some(first) = violations.first() {
        return Err(Error::Infeasible(format!("{} constraint violations, first: {first}", violations.len())));
    }
    Ok(())
}

fn format_fractions(xs: &[f64]) -> String {
    xs.iter().map(|f| format!("{f:.2}")).collect::<Vec<_>>().join(" ")
}

pub fn solve(a: &SolveArgs) -> Result<u8> {
    let s = a.source.load()?;
    let opts = a.bcd.options(&s);
    let out = bcd::solve(&s, &opts)?;
    let sol = &out.solution;
    let summary = write_solution(&a.output, &s, sol, "trajectory")?;
    io::write_iterations(create(&a.output.join(ITERATIONS_FILE))?, &sol.history)?;
    check_feasible(&s, sol)?;
    let status = match out.status {
        BcdStatus::Converged => "converged",
        BcdStatus::MaxIterations => "max_iterations",
    };
    println!("status {status} after {} iterations", out.iterations);
    println!("objective {:.6} dB", sol.objective);
    println!("mean pathloss per user {:.6} dB, std {:.6} dB", summary.mean_per_user, summary.std_dev);
    println!("hovering fraction per DC: {}", format_fractions(&hovering_fraction(&sol.trajectory, HOVER_TOL)));
    Ok(match out.status {
        BcdStatus::Converged => EXIT_OK,
        BcdStatus::MaxIterations => EXIT_MAX_ITERATIONS,
    })
}

pub fn baseline(a: &BaselineArgs) -> Result<u8> {
    let s = a.source.load()?;
    let dep = solve_static(&s, &a.pso.options())?;
    let sol = static_as_trajectory(&dep, &s, a.schedule_fill)?;
    let summary = write_solution(&a.output, &s, &sol, "static")?;
    check_feasible(&s, &sol)?;
    for (d, p) in dep.positions.iter().enumerate() {
        println!("DC {d} at ({:.3}, {:.3}, {:.3})", p.x, p.y, p.h);
    }
    println!("mean pathloss per user {:.6} dB, std {:.6} dB", summary.mean_per_user, summary.std_dev);
    Ok(EXIT_OK)
}

pub fn compare(a: &CompareArgs) -> Result<u8> {
    let cfg = SweepConfig::from_args(a);
    let runs = run_sweep(&cfg)?;
    let aggs = aggregate(&runs);
    write_sweep(&a.output, &runs, &aggs)?;
    println!("dcs  runs  trajectory_db  static_db  gap_db  std_traj  std_static  std_reduction");
    for g in &aggs {
        println!(
            "{:>3}  {:>4}  {:>13.3}  {:>9.3}  {:>6.3}  {:>8.3}  {:>10.3}  {:>12.2}%",
            g.dcs,
            g.runs,
            g.trajectory_mean,
            g.static_mean,
            g.gap,
            g.trajectory_std,
            g.static_std,
            100.0 * g.std_reduction
        );
    }
    if !aggs.is_empty() {
        let avg = aggs.iter().map(|g| g.std_reduction).sum::<f64>() / aggs.len() as f64;
        println!("average std reduction {:.2}%", 100.0 * avg);
    }
    Ok(EXIT_OK)
}

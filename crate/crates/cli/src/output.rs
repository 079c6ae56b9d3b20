//! Solution files written by `solve` and `baseline`.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use dctraj_core::metrics::{summarize, write_metrics_csv, write_summary_csv, UserPathlossSummary};
use dctraj_core::model::{io, Scenario, Solution};
use dctraj_core::Result;

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const ASSOCIATION_FILE: &str = "association.csv";
pub const SCHEDULE_FILE: &str = "schedule.csv";
pub const METRICS_FILE: &str = "metrics.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const ITERATIONS_FILE: &str = "iterations.csv";

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Writes the trajectory, association, schedule, metrics and summary
/// tables of `sol` into `dir`, labelling the summary row `method`.
pub fn write_solution(dir: &Path, s: &Scenario, sol: &Solution, method: &str) -> Result<UserPathlossSummary> {
    std::fs::create_dir_all(dir)?;
    io::write_trajectory(create(&dir.join(TRAJECTORY_FILE))?, &sol.trajectory)?;
    io::write_association(create(&dir.join(ASSOCIATION_FILE))?, &sol.assoc)?;
    io::write_schedule(create(&dir.join(SCHEDULE_FILE))?, &sol.sched)?;
    let summary = summarize(sol, s)?;
    write_metrics_csv(create(&dir.join(METRICS_FILE))?, &summary)?;
    write_summary_csv(create(&dir.join(SUMMARY_FILE))?, &[(method, &summary)])?;
    Ok(summary)
}

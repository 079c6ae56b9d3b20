//! Per-user pathloss statistics and method comparison.
//!
//! `metrics.csv` has one row per user: `user,dc,slots,mean_pathloss_db`.
//! `summary.csv` has one row per method:
//! `method,users,mean_per_user_db,mean_per_slot_db,std_db`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::model::{slot_pathloss, Scenario, Solution, Trajectory};
use crate::{Error, Result};

/// Default horizontal tolerance for counting a slot as hovering, m.
pub const HOVER_TOL: f64 = 1.0;
/// Resolution of the pathloss CDF, dB.
pub const CDF_STEP_DB: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StdConvention {
    /// Divide by the number of users.
    #[default]
    Population,
    /// Divide by one less than the number of users.
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub pathloss_db: f64,
    /// Fraction of users whose mean pathloss is at most `pathloss_db`.
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserPathlossSummary {
    /// Mean pathloss over each user's scheduled slots, dB.
    pub per_user: Vec<f64>,
    pub slots: Vec<usize>,
    pub serving_dc: Vec<usize>,
    pub mean_per_user: f64,
    pub mean_per_slot: f64,
    pub std_dev: f64,
    pub cdf: Vec<CdfPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Static mean minus trajectory mean, per user, dB.
    pub mean_gap: f64,
    /// Same gap for the per-slot mean, dB.
    pub slot_mean_gap: f64,
    pub std_trajectory: f64,
    pub std_static: f64,
    /// `(std_static - std_trajectory) / std_static`; 0 when both are 0.
    pub std_reduction: f64,
}

/// Standard deviation of `xs` about its mean.
pub fn std_dev(xs: &[f64], convention: StdConvention) -> f64 {
    let n = xs.len();
    let denom = match convention {
        StdConvention::Population => n,
        StdConvention::Sample => n.saturating_sub(1),
    };
    if denom == 0 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / denom as f64).sqrt()
}

/// Fraction of values at or below each whole-dB step spanning the data.
pub fn cdf(values: &[f64]) -> Vec<CdfPoint> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let lo = (sorted[0] / CDF_STEP_DB).floor() as i64;
    let hi = (sorted[sorted.len() - 1] / CDF_STEP_DB).ceil() as i64;
    (lo..=hi)
        .map(|k| {
            let x = k as f64 * CDF_STEP_DB;
            let count = sorted.partition_point(|&v| v <= x);
            CdfPoint { pathloss_db: x, fraction: count as f64 / sorted.len() as f64 }
        })
        .collect()
}

pub fn summarize(sol: &Solution, s: &Scenario) -> Result<UserPathlossSummary> {
    summarize_with(sol, s, StdConvention::Population)
}

pub fn summarize_with(sol: &Solution, s: &Scenario, convention: StdConvention) -> Result<UserPathlossSummary> {
    let nu = s.num_users();
    let mut sum = vec![0.0; nu];
    let mut slots = vec![0usize; nu];
    for (d, row) in sol.sched.served.iter().enumerate() {
        for (n, &cell) in row.iter().enumerate() {
            if let Some(u) = cell {
                if sol.assoc.is_associated(u, d) {
                    sum[u] += slot_pathloss(s, u, sol.trajectory.point(d, n));
                    slots[u] += 1;
                }
            }
        }
    }
    if let Some(u) = slots.iter().position(|&c| c == 0) {
        return Err(Error::Unscheduled(u));
    }
    let per_user: Vec<f64> = sum.iter().zip(&slots).map(|(t, &c)| t / c as f64).collect();
    let total_slots: usize = slots.iter().sum();
    Ok(UserPathlossSummary {
        mean_per_user: per_user.iter().sum::<f64>() / nu.max(1) as f64,
        mean_per_slot: if total_slots == 0 { 0.0 } else { sum.iter().sum::<f64>() / total_slots as f64 },
        std_dev: std_dev(&per_user, convention),
        cdf: cdf(&per_user),
        serving_dc: sol.assoc.dc_of.clone(),
        slots,
        per_user,
    })
}

/// Per-DC fraction of slots whose horizontal move to the next slot is
/// shorter than `tol`.
pub fn hovering_fraction(traj: &Trajectory, tol: f64) -> Vec<f64> {
    traj.paths
        .iter()
        .map(|path| {
            let n = path.len();
            if n == 0 {
                return 0.0;
            }
            let still = (0..n).filter(|&i| path[i].horizontal().dist(path[(i + 1) % n].horizontal()) < tol).count();
            still as f64 / n as f64
        })
        .collect()
}

/// Trajectory design `g` against static deployment `st`.
pub fn compare(g: &UserPathlossSummary, st: &UserPathlossSummary) -> ComparisonReport {
    ComparisonReport {
        mean_gap: st.mean_per_user - g.mean_per_user,
        slot_mean_gap: st.mean_per_slot - g.mean_per_slot,
        std_trajectory: g.std_dev,
        std_static: st.std_dev,
        std_reduction: std_reduction(st.std_dev, g.std_dev),
    }
}

pub fn std_reduction(std_static: f64, std_trajectory: f64) -> f64 {
    if std_static == 0.0 {
        0.0
    } else {
        (std_static - std_trajectory) / std_static
    }
}

pub fn write_metrics_csv<W: Write>(w: W, summary: &UserPathlossSummary) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["user", "dc", "slots", "mean_pathloss_db"])?;
    for (u, mean) in summary.per_user.iter().enumerate() {
        out.write_record([
            u.to_string(),
            summary.serving_dc[u].to_string(),
            summary.slots[u].to_string(),
            format!("{mean:.6}"),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(w: W, rows: &[(&str, &UserPathlossSummary)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["method", "users", "mean_per_user_db", "mean_per_slot_db", "std_db"])?;
    for (method, s) in rows {
        out.write_record([
            method.to_string(),
            s.per_user.len().to_string(),
            format!("{:.6}", s.mean_per_user),
            format!("{:.6}", s.mean_per_slot),
            format!("{:.6}", s.std_dev),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Vec2, Waypoint};
    use crate::model::{evaluate_objective, generate_scenario, Association, Schedule, ScenarioOverrides};

    fn two_user_solution(h0: f64, h1: f64) -> (Scenario, Solution) {
        let o = ScenarioOverrides { num_slots: Some(8), s_min: Some(2), n_u: Some(1), ..Default::default() };
        let mut s = generate_scenario(1, 2, 2, &o).unwrap();
        s.users = vec![Vec2::new(100.0, 0.0), Vec2::new(-100.0, 0.0)];
        let t = Trajectory::stationary(&[Waypoint::new(100.0, 0.0, h0), Waypoint::new(-100.0, 0.0, h1)], 8);
        let a = Association::new(vec![0, 1]);
        let mut k = Schedule::idle(2, 8);
        k.served[0][..4].fill(Some(0));
        k.served[1][2..8].fill(Some(1));
        let objective = evaluate_objective(&s, &t, &a, &k);
        (s, Solution { trajectory: t, assoc: a, sched: k, objective, history: vec![] })
    }

    #[test]
    fn identical_pathloss_has_zero_spread() {
        let (s, sol) = two_user_solution(50.0, 50.0);
        let m = summarize(&sol, &s).unwrap();
        assert!((m.per_user[0] - m.per_user[1]).abs() < 1e-12);
        assert!(m.std_dev < 1e-12);
        assert!((m.mean_per_user - m.per_user[0]).abs() < 1e-12);
        assert_eq!(m.cdf.last().unwrap().fraction, 1.0);
    }

    #[test]
    fn population_std_by_hand() {
        assert_eq!(std_dev(&[80.0, 90.0], StdConvention::Population), 5.0);
        assert!((std_dev(&[80.0, 90.0], StdConvention::Sample) - 50f64.sqrt()).abs() < 1e-12);
        let m = UserPathlossSummary {
            per_user: vec![80.0, 90.0],
            slots: vec![1, 1],
            serving_dc: vec![0, 0],
            mean_per_user: 85.0,
            mean_per_slot: 85.0,
            std_dev: 5.0,
            cdf: cdf(&[80.0, 90.0]),
        };
        assert_eq!(m.cdf.first().unwrap().fraction, 0.5);
        assert_eq!(m.cdf.len(), 11);
        assert!(m.cdf.windows(2).all(|w| w[0].fraction <= w[1].fraction));
    }

    #[test]
    fn std_matches_two_pass_reference() {
        let xs: Vec<f64> = (0..50).map(|i| 70.0 + ((i * 37) % 17) as f64 * 0.731).collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let want = var.sqrt();
        assert!((std_dev(&xs, StdConvention::Population) - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn means_per_user_and_per_slot() {
        let (s, sol) = two_user_solution(40.0, 80.0);
        let m = summarize(&sol, &s).unwrap();
        let l0 = crate::channel::u2d_db(0.0, 40.0, &s.u2d);
        let l1 = crate::channel::u2d_db(0.0, 80.0, &s.u2d);
        assert!((m.mean_per_user - 0.5 * (l0 + l1)).abs() < 1e-9);
        assert!((m.mean_per_slot - (4.0 * l0 + 6.0 * l1) / 10.0).abs() < 1e-9);
        assert_eq!(m.slots, vec![4, 6]);
    }

    #[test]
    fn unscheduled_user_is_an_error() {
        let (s, mut sol) = two_user_solution(40.0, 80.0);
        sol.sched.served[1].fill(None);
        assert!(matches!(summarize(&sol, &s), Err(Error::Unscheduled(1))));
    }

    #[test]
    fn invariant_under_slot_relabeling() {
        let (s, sol) = two_user_solution(40.0, 80.0);
        let mut moved = sol.clone();
        let n = s.num_slots;
        let shift = |v: &Vec<Waypoint>| (0..n).map(|i| v[(i + 3) % n]).collect::<Vec<_>>();
        moved.trajectory.paths = moved.trajectory.paths.iter().map(shift).collect();
        moved.sched.served = sol.sched.served.iter().map(|r| (0..n).map(|i| r[(i + 3) % n]).collect()).collect();
        assert_eq!(summarize(&sol, &s).unwrap().per_user, summarize(&moved, &s).unwrap().per_user);
    }

    #[test]
    fn hovering_extremes() {
        let still = Trajectory::stationary(&[Waypoint::new(5.0, 5.0, 50.0)], 10);
        assert_eq!(hovering_fraction(&still, HOVER_TOL), vec![1.0]);
        let path: Vec<Waypoint> = (0..10).map(|i| Waypoint::at(Vec2::from_polar(100.0, i as f64 * 0.6), 50.0)).collect();
        assert_eq!(hovering_fraction(&Trajectory::new(vec![path]), HOVER_TOL), vec![0.0]);
    }

    #[test]
    fn comparison_reductions() {
        let (s, sol) = two_user_solution(40.0, 80.0);
        let m = summarize(&sol, &s).unwrap();
        let r = compare(&m, &m);
        assert_eq!((r.mean_gap, r.std_reduction), (0.0, 0.0));
        assert!((std_reduction(6.7562, 2.1818) - 0.6771).abs() < 5e-5);
        assert!((std_reduction(7.2211, 3.8481) - 0.4671).abs() < 5e-5);
    }

    #[test]
    fn csv_outputs() {
        let (s, sol) = two_user_solution(40.0, 80.0);
        let m = summarize(&sol, &s).unwrap();
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &m).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("user,dc,slots,mean_pathloss_db\n0,0,4,"));
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &[("trajectory", &m)]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
    }
}

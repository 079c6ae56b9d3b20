//! Block-coordinate descent over association, schedule, horizontal and
//! vertical trajectory.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::assign::{
    association_costs, brute_force_association, brute_force_schedule, slot_costs, solve_association,
    solve_scheduling, static_costs, BRUTE_MAX_DCS, BRUTE_MAX_SLOTS, BRUTE_MAX_USERS,
};
use crate::channel::d2b_feasible_radius;
use crate::geom::Waypoint;
use crate::model::{
    evaluate_objective, initial_schedule, initial_trajectories, Association, IterationRecord, Scenario, Schedule,
    ScheduleFill, Solution, Trajectory,
};
use crate::traj::{altitude_sweep, horizontal_sweep};
use crate::{Error, Result};

/// Allowed objective increase between iterations, dB.
pub const MONOTONE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcdOptions {
    /// Stop once no slot position moves more than this in an iteration, m.
    pub epsilon: f64,
    pub max_iterations: usize,
    pub schedule_fill: ScheduleFill,
    pub record_history: bool,
    /// Cross-check every association and schedule against the brute-force
    /// solvers when the instance is small enough.
    pub oracle: bool,
}

impl Default for BcdOptions {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            max_iterations: 100,
            schedule_fill: ScheduleFill::Full,
            record_history: true,
            oracle: false,
        }
    }
}

impl BcdOptions {
    /// Defaults with the scenario's convergence threshold.
    pub fn for_scenario(s: &Scenario) -> Self {
        Self { epsilon: s.epsilon, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidScenario(format!(
                "epsilon must be positive and max_iterations at least 1 (got {}, {})",
                self.epsilon, self.max_iterations
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcdStatus {
    Converged,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BcdOutcome {
    pub solution: Solution,
    pub status: BcdStatus,
    pub iterations: usize,
}

/// Starting hover point of each DC: the ring point at the initial altitude,
/// lowered until it lies in the BS-connected backhaul disk, and as a last
/// resort pulled toward the BS at the altitude floor.
pub fn feasible_start(s: &Scenario) -> Result<Trajectory> {
    let ring = initial_trajectories(s);
    if !s.l_db.is_finite() {
        return Ok(ring);
    }
    let mut points = Vec::with_capacity(s.num_dcs);
    for path in &ring.paths {
        let p = path[0];
        let pos = p.horizontal();
        let r = pos.norm();
        let mut h = p.h.clamp(s.h_min, s.limits.h_cap);
        let mut placed = None;
        while h >= s.h_min {
            if d2b_feasible_radius(h, s.l_db, &s.d2b, &s.limits).is_ok_and(|rad| rad >= r) {
                placed = Some(Waypoint::at(pos, h));
                break;
            }
            h -= 1.0;
        }
        let point = match placed {
            Some(w) => w,
            None => {
                let rad = d2b_feasible_radius(s.h_min, s.l_db, &s.d2b, &s.limits).map_err(|_| {
                    Error::Infeasible(format!("no backhaul-feasible hover point at the {} m altitude floor", s.h_min))
                })?;
                let dir = if r > 0.0 { pos * (1.0 / r) } else { pos };
                Waypoint::at(dir * r.min(rad), s.h_min)
            }
        };
        points.push(point);
    }
    Ok(Trajectory::stationary(&points, s.num_slots))
}

fn small_enough(s: &Scenario) -> bool {
    s.num_users() <= BRUTE_MAX_USERS && s.num_dcs <= BRUTE_MAX_DCS && s.num_slots <= BRUTE_MAX_SLOTS
}

fn check_oracles(
    s: &Scenario,
    traj: &Trajectory,
    sched: &Schedule,
    assoc: &Association,
    fill: ScheduleFill,
) -> Result<()> {
    let cost = association_costs(s, traj, sched);
    let exact = solve_association(&cost, s.n_u)?;
    let brute = brute_force_association(&cost, s.n_u)?;
    if cost.total_units(&exact) != cost.total_units(&brute) {
        return Err(Error::OracleMismatch(format!(
            "association cost {} vs brute force {}",
            cost.total(&exact),
            cost.total(&brute)
        )));
    }
    let w = slot_costs(s, traj, assoc);
    let k = solve_scheduling(&w, assoc, s.s_min, s.num_slots, fill)?;
    let kb = brute_force_schedule(&w, assoc, s.s_min, s.num_slots, fill)?;
    if w.total_units(&k) != w.total_units(&kb) {
        return Err(Error::OracleMismatch(format!("schedule cost {} vs brute force {}", w.total(&k), w.total(&kb))));
    }
    Ok(())
}

/// Runs the descent to convergence or the iteration cap.
pub fn solve(s: &Scenario, opts: &BcdOptions) -> Result<BcdOutcome> {
    solve_with_observer(s, opts, |_| {})
}

/// As [`solve`], reporting each finished iteration to `observer`.
pub fn solve_with_observer(
    s: &Scenario,
    opts: &BcdOptions,
    mut observer: impl FnMut(&IterationRecord),
) -> Result<BcdOutcome> {
    s.validate()?;
    opts.validate()?;
    let started = Instant::now();
    let mut traj = feasible_start(s)?;
    let starts: Vec<Waypoint> = traj.paths.iter().map(|p| p[0]).collect();
    let mut assoc = solve_association(&static_costs(s, &starts), s.n_u)?;
    let mut sched = initial_schedule(s, &assoc)?;
    let mut objective = evaluate_objective(s, &traj, &assoc, &sched);
    let mut history = Vec::new();
    let mut status = BcdStatus::MaxIterations;
    let mut iterations = 0;
    log::debug!("start objective {objective:.6}");

    for t in 1..=opts.max_iterations {
        iterations = t;
        let before = traj.clone();
        let prev_objective = objective;

        if opts.oracle && small_enough(s) {
            check_oracles(s, &traj, &sched, &assoc, opts.schedule_fill)?;
        }
        // association with each user's slot pattern, then its exact schedule;
        // kept only if it beats the exact schedule of the old association
        let new_assoc = solve_association(&association_costs(s, &traj, &sched), s.n_u)?;
        let mut candidates = vec![(assoc.clone(), sched.clone())];
        let resched = solve_scheduling(&slot_costs(s, &traj, &assoc), &assoc, s.s_min, s.num_slots, opts.schedule_fill)?;
        candidates.push((assoc.clone(), resched));
        if new_assoc != assoc {
            let k = solve_scheduling(&slot_costs(s, &traj, &new_assoc), &new_assoc, s.s_min, s.num_slots, opts.schedule_fill)?;
            candidates.push((new_assoc, k));
        }
        let mut best = evaluate_objective(s, &traj, &candidates[0].0, &candidates[0].1);
        let mut pick = 0;
        for (i, (a, k)) in candidates.iter().enumerate().skip(1) {
            let g = evaluate_objective(s, &traj, a, k);
            if g < best {
                best = g;
                pick = i;
            }
        }
        (assoc, sched) = candidates.swap_remove(pick);

        horizontal_sweep(s, &mut traj, &sched);
        altitude_sweep(s, &mut traj, &sched);
        objective = evaluate_objective(s, &traj, &assoc, &sched);
        debug_assert!(objective <= prev_objective + MONOTONE_TOL, "objective rose from {prev_objective} to {objective}");

        let delta_g = traj.max_displacement(&before);
        let record = IterationRecord { iteration: t, objective, delta_g };
        log::info!(
            "iteration {t}: objective {objective:.6} dB, delta_g {delta_g:.6} m, {:.3} s",
            started.elapsed().as_secs_f64()
        );
        observer(&record);
        if opts.record_history {
            history.push(record);
        }
        if delta_g < opts.epsilon {
            status = BcdStatus::Converged;
            break;
        }
    }
    let solution = Solution { trajectory: traj, assoc, sched, objective, history };
    Ok(BcdOutcome { solution, status, iterations })
}

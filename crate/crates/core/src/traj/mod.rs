//! Per-slot trajectory updates with association and schedule fixed.
//!
//! The horizontal sweep projects each slot position toward its target user
//! subject to the speed disks of the neighbouring slots and the backhaul
//! region at the slot's altitude. The altitude sweep then picks the best
//! altitude for each slot within its vertical-speed and backhaul window.
//! Every update is accepted only if it keeps the trajectory feasible and
//! does not increase that slot's pathloss, so both sweeps are monotone.

mod altitude;
mod project;

pub use altitude::{is_unimodal, optimize_altitude, AltitudeWindow, ALTITUDE_TOL, UNIMODALITY_SAMPLES};
pub use project::{project_horizontal, DiskConstraint, INSIDE_TOL, PROJECTION_MAX_ITER, PROJECTION_TOL};

use crate::channel::{
    d2b_db_clamped, d2b_feasible_altitude_interval, d2b_radial_intervals, interval_around, u2d_db, D2B_R_MIN,
};
use crate::geom::{Vec2, Waypoint};
use crate::model::{Scenario, Schedule, Trajectory};

const ARC_SAMPLES: usize = 720;

/// User whose position steers slot `n` of DC `d`: the scheduled user, or
/// for an idle slot the next scheduled user in cyclic order.
pub fn slot_target(sched: &Schedule, d: usize, n: usize) -> Option<usize> {
    let row = &sched.served[d];
    let len = row.len();
    (0..len).find_map(|k| row[(n + k) % len])
}

fn backhaul_ok(s: &Scenario, p: Vec2, h: f64) -> bool {
    !s.l_db.is_finite() || d2b_db_clamped(p.norm(), h, &s.d2b) <= s.l_db
}

/// Nearest point to `target` on the circle of radius `radius` about the
/// origin that lies within `v_max` of both neighbours.
fn best_on_circle(target: Vec2, radius: f64, prev: Vec2, next: Vec2, v_max: f64) -> Option<Vec2> {
    let ok = |q: Vec2| q.dist(prev) <= v_max + INSIDE_TOL && q.dist(next) <= v_max + INSIDE_TOL;
    let step = std::f64::consts::TAU / ARC_SAMPLES as f64;
    let mut best: Option<(f64, f64)> = None;
    for i in 0..ARC_SAMPLES {
        let phi = i as f64 * step;
        let q = Vec2::from_polar(radius, phi);
        if ok(q) {
            let c = q.dist(target);
            if best.is_none_or(|(_, b)| c < b) {
                best = Some((phi, c));
            }
        }
    }
    let (mut phi, mut cost) = best?;
    let mut width = step;
    while width > 1e-9 {
        let mut moved = false;
        for cand in [phi - width, phi + width] {
            let q = Vec2::from_polar(radius, cand);
            let c = q.dist(target);
            if ok(q) && c < cost {
                phi = cand;
                cost = c;
                moved = true;
            }
        }
        if !moved {
            width *= 0.5;
        }
    }
    Some(Vec2::from_polar(radius, phi))
}

/// Best horizontal position for one slot with its neighbours fixed.
fn horizontal_candidate(s: &Scenario, target: Vec2, cur: Vec2, h: f64, prev: Vec2, next: Vec2) -> Vec2 {
    let speed = [DiskConstraint::new(prev, s.v_max), DiskConstraint::new(next, s.v_max)];
    let intervals = d2b_radial_intervals(h, s.l_db, &s.d2b, &s.limits);
    let r0 = cur.norm().max(D2B_R_MIN);
    let Some(band) = interval_around(&intervals, r0) else { return cur };
    let outer = DiskConstraint::new(Vec2::ZERO, band.hi);
    let disks = [speed[0], speed[1], outer];
    let p = project_horizontal(target, &disks, cur);
    if band.lo <= D2B_R_MIN || p.norm() >= band.lo {
        return p;
    }
    // the hole of an annulus: the optimum sits on its inner circle
    best_on_circle(target, band.lo, prev, next, s.v_max).unwrap_or(cur)
}

/// One horizontal pass over DC `d`, slots in increasing order.
pub fn horizontal_sweep_dc(s: &Scenario, traj: &mut Trajectory, sched: &Schedule, d: usize) {
    let n_slots = s.num_slots;
    for n in 0..n_slots {
        let Some(u) = slot_target(sched, d, n) else { return };
        let user = s.users[u];
        let path = &traj.paths[d];
        let cur = path[n];
        let prev = path[(n + n_slots - 1) % n_slots].horizontal();
        let next = path[(n + 1) % n_slots].horizontal();
        let cand = horizontal_candidate(s, user, cur.horizontal(), cur.h, prev, next);
        let feasible = cand.dist(prev) <= s.v_max + INSIDE_TOL
            && cand.dist(next) <= s.v_max + INSIDE_TOL
            && backhaul_ok(s, cand, cur.h);
        if feasible && cand.dist(user) <= cur.horizontal().dist(user) {
            traj.paths[d][n] = Waypoint::at(cand, cur.h);
        }
    }
}

/// One altitude pass over DC `d`, slots in increasing order.
pub fn altitude_sweep_dc(s: &Scenario, traj: &mut Trajectory, sched: &Schedule, d: usize) {
    let n_slots = s.num_slots;
    for n in 0..n_slots {
        let Some(u) = slot_target(sched, d, n) else { return };
        let path = &traj.paths[d];
        let cur = path[n];
        let (hp, hn) = (path[(n + n_slots - 1) % n_slots].h, path[(n + 1) % n_slots].h);
        let pos = cur.horizontal();
        let mut lo = s.h_min.max(hp - s.h_max_rate).max(hn - s.h_max_rate);
        let mut hi = s.limits.h_cap.min(hp + s.h_max_rate).min(hn + s.h_max_rate);
        if s.l_db.is_finite() {
            let Ok(bands) = d2b_feasible_altitude_interval(pos.norm().max(D2B_R_MIN), s.l_db, &s.d2b, &s.limits)
            else {
                continue;
            };
            let Some(band) = interval_around(&bands, cur.h) else { continue };
            lo = lo.max(band.lo);
            hi = hi.min(band.hi);
        }
        let Ok(window) = AltitudeWindow::new(lo, hi) else { continue };
        let r = pos.dist(s.users[u]);
        if log::log_enabled!(log::Level::Debug) && !is_unimodal(r, window, &s.u2d) {
            log::warn!("pathloss not unimodal in altitude at r = {r:.3} m, window [{lo:.3}, {hi:.3}]");
        }
        let h = optimize_altitude(r, window, &s.u2d);
        let feasible = (h - hp).abs() <= s.h_max_rate + INSIDE_TOL
            && (h - hn).abs() <= s.h_max_rate + INSIDE_TOL
            && h >= s.h_min
            && h <= s.limits.h_cap
            && backhaul_ok(s, pos, h);
        if feasible && u2d_db(r, h, &s.u2d) <= u2d_db(r, cur.h, &s.u2d) {
            traj.paths[d][n] = Waypoint::at(pos, h);
        }
    }
}

/// Horizontal pass over every DC in index order.
pub fn horizontal_sweep(s: &Scenario, traj: &mut Trajectory, sched: &Schedule) {
    for d in 0..s.num_dcs {
        horizontal_sweep_dc(s, traj, sched, d);
    }
}

/// Altitude pass over every DC in index order.
pub fn altitude_sweep(s: &Scenario, traj: &mut Trajectory, sched: &Schedule) {
    for d in 0..s.num_dcs {
        altitude_sweep_dc(s, traj, sched, d);
    }
}

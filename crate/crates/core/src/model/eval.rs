use super::{Association, Schedule, Scenario, Trajectory};
use crate::channel::u2d_db;
use crate::geom::Waypoint;

/// U2D pathloss between user `u` and a DC at `wp`, dB.
pub fn slot_pathloss(s: &Scenario, u: usize, wp: Waypoint) -> f64 {
    let r = wp.horizontal().dist(s.users[u]);
    u2d_db(r, wp.h, &s.u2d)
}

/// Sum of U2D pathloss over every scheduled slot of every associated pair.
pub fn evaluate_objective(
    s: &Scenario,
    traj: &Trajectory,
    assoc: &Association,
    sched: &Schedule,
) -> f64 {
    let mut total = 0.0;
    for (d, row) in sched.served.iter().enumerate() {
        for (n, &user) in row.iter().enumerate() {
            if let Some(u) = user {
                if assoc.is_associated(u, d) {
                    total += slot_pathloss(s, u, traj.point(d, n));
                }
            }
        }
    }
    total
}

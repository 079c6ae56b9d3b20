use super::{Association, Schedule, Scenario, Trajectory};
use crate::geom::{Vec2, Waypoint};
use crate::{Error, Result};

/// Static start: DC `i` hovers at angle `2 pi i / |D|` on the ring of
/// radius `r_bs / 2`, at the initial altitude.
pub fn initial_trajectories(s: &Scenario) -> Trajectory {
    let d = s.num_dcs;
    let points: Vec<Waypoint> = (0..d)
        .map(|i| {
            let ang = std::f64::consts::TAU * i as f64 / d as f64;
            Waypoint::at(Vec2::from_polar(0.5 * s.r_bs, ang), s.h_init)
        })
        .collect();
    Trajectory::stationary(&points, s.num_slots)
}

/// Round-robin schedule: each DC's users, in index order, get contiguous
/// blocks of `N / |U_d|` slots; the remainder goes one slot each to the
/// lowest-index users.
pub fn initial_schedule(s: &Scenario, assoc: &Association) -> Result<Schedule> {
    let n = s.num_slots;
    let mut sched = Schedule::idle(s.num_dcs, n);
    for d in 0..s.num_dcs {
        let users = assoc.users_of(d);
        if users.is_empty() {
            continue;
        }
        let base = n / users.len();
        if base < s.s_min {
            return Err(Error::Infeasible(format!(
                "DC {d} has {} users but only {n} slots for {} each",
                users.len(),
                s.s_min
            )));
        }
        let extra = n % users.len();
        let mut slot = 0;
        for (i, &u) in users.iter().enumerate() {
            let len = base + usize::from(i < extra);
            for cell in &mut sched.served[d][slot..slot + len] {
                *cell = Some(u);
            }
            slot += len;
        }
    }
    Ok(sched)
}

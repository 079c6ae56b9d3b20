use std::fmt;

use super::solution::neighbours;
use super::{evaluate_objective, Scenario, Solution};
use crate::channel::d2b_db_clamped;

const GEOM_TOL: f64 = 1e-6;
const DB_TOL: f64 = 1e-6;

/// Constraint families of the joint design problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    /// Per-DC user limit `n_u`.
    Capacity,
    /// Every user served by exactly one valid DC.
    Association,
    /// A DC serves only its own users (the `k <= a` coupling).
    Coupling,
    /// A user is served by at most one DC per slot.
    UserSlot,
    /// Associated users receive at least `s_min` slots.
    MinSlots,
    /// Matrix or trajectory dimensions disagree with the scenario.
    Shape,
    /// Horizontal speed between consecutive slots, wrap included.
    HorizontalSpeed,
    /// Vertical speed between consecutive slots, wrap included.
    VerticalSpeed,
    /// D2B pathloss bound.
    Backhaul,
    /// Altitude outside `[h_min, h_cap]`.
    Altitude,
    /// Stored objective differs from its re-evaluation.
    Objective,
}

impl Constraint {
    pub fn label(self) -> &'static str {
        match self {
            Self::Capacity => "dc-capacity",
            Self::Association => "single-association",
            Self::Coupling => "dc-slot",
            Self::UserSlot => "user-slot",
            Self::MinSlots => "min-slots",
            Self::Shape => "shape",
            Self::HorizontalSpeed => "horizontal-speed",
            Self::VerticalSpeed => "vertical-speed",
            Self::Backhaul => "backhaul",
            Self::Altitude => "altitude",
            Self::Objective => "objective",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub constraint: Constraint,
    pub dc: Option<usize>,
    pub user: Option<usize>,
    pub slot: Option<usize>,
    /// How far past the limit, in the constraint's unit.
    pub magnitude: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {:?}", self.constraint.label(), self.constraint)?;
        if let Some(d) = self.dc {
            write!(f, " dc={d}")?;
        }
        if let Some(u) = self.user {
            write!(f, " user={u}")?;
        }
        if let Some(n) = self.slot {
            write!(f, " slot={n}")?;
        }
        write!(f, " by {}", self.magnitude)
    }
}

fn v(constraint: Constraint, dc: Option<usize>, user: Option<usize>, slot: Option<usize>, magnitude: f64) -> Violation {
    Violation { constraint, dc, user, slot, magnitude }
}

/// Every constraint violation in `sol`; empty when feasible.
pub fn validate_solution(s: &Scenario, sol: &Solution) -> Vec<Violation> {
    use Constraint::*;
    let mut out = Vec::new();
    let (nu, nd, ns) = (s.num_users(), s.num_dcs, s.num_slots);
    let traj = &sol.trajectory;
    let shape_ok = traj.num_dcs() == nd
        && traj.paths.iter().all(|p| p.len() == ns)
        && sol.assoc.num_users() == nu
        && sol.sched.served.len() == nd
        && sol.sched.served.iter().all(|r| r.len() == ns);
    if !shape_ok {
        out.push(v(Shape, None, None, None, 1.0));
        return out;
    }

    for (u, &d) in sol.assoc.dc_of.iter().enumerate() {
        if d >= nd {
            out.push(v(Association, Some(d), Some(u), None, 1.0));
        }
    }
    for d in 0..nd {
        let load = sol.assoc.load(d);
        if load > s.n_u {
            out.push(v(Capacity, Some(d), None, None, (load - s.n_u) as f64));
        }
    }

    let mut served_by = vec![vec![0usize; ns]; nu];
    for (d, row) in sol.sched.served.iter().enumerate() {
        for (n, &cell) in row.iter().enumerate() {
            let Some(u) = cell else { continue };
            if u >= nu {
                out.push(v(Shape, Some(d), Some(u), Some(n), 1.0));
                continue;
            }
            served_by[u][n] += 1;
            if !sol.assoc.is_associated(u, d) {
                out.push(v(Coupling, Some(d), Some(u), Some(n), 1.0));
            }
        }
    }
    for (u, row) in served_by.iter().enumerate() {
        for (n, &c) in row.iter().enumerate() {
            if c > 1 {
                out.push(v(UserSlot, None, Some(u), Some(n), (c - 1) as f64));
            }
        }
    }
    for (u, &d) in sol.assoc.dc_of.iter().enumerate() {
        if d < nd {
            let got = sol.sched.slot_count(u, d);
            if got < s.s_min {
                out.push(v(MinSlots, Some(d), Some(u), None, (s.s_min - got) as f64));
            }
        }
    }

    for (d, path) in traj.paths.iter().enumerate() {
        for (n, &p) in path.iter().enumerate() {
            let (_, next) = neighbours(n, ns);
            let q = path[next];
            let dh = (q.horizontal().dist(p.horizontal()) - s.v_max).max(0.0);
            if dh > GEOM_TOL {
                out.push(v(HorizontalSpeed, Some(d), None, Some(n), dh));
            }
            let dv = ((q.h - p.h).abs() - s.h_max_rate).max(0.0);
            if dv > GEOM_TOL {
                out.push(v(VerticalSpeed, Some(d), None, Some(n), dv));
            }
            if p.h < s.h_min - GEOM_TOL || p.h > s.limits.h_cap + GEOM_TOL || !p.h.is_finite() {
                let m = (s.h_min - p.h).max(p.h - s.limits.h_cap);
                out.push(v(Altitude, Some(d), None, Some(n), m));
            }
            if s.l_db.is_finite() {
                let excess = d2b_db_clamped(p.horizontal().norm(), p.h.max(0.0), &s.d2b) - s.l_db;
                if excess > DB_TOL {
                    out.push(v(Backhaul, Some(d), None, Some(n), excess));
                }
            }
        }
    }

    let fresh = evaluate_objective(s, traj, &sol.assoc, &sol.sched);
    let gap = (fresh - sol.objective).abs();
    if gap > DB_TOL * fresh.abs().max(1.0) {
        out.push(v(Objective, None, None, None, gap));
    }
    out
}

//! Exact solvers for the association and scheduling integer programs.
//!
//! Both problems have transportation structure and are solved as
//! min-cost flows on integer costs (1 unit = 1e-6 dB). Ties are broken
//! deterministically by a lexicographic perturbation that can never
//! outweigh one cost unit: association prefers lower DC indices, scheduling
//! prefers earlier slots and then lower user indices.
//!
//! The brute-force solvers are reference oracles for small instances.

mod flow;

use crate::channel::u2d_db;
use crate::geom::Waypoint;
use crate::model::{slot_pathloss, Association, Scenario, Schedule, ScheduleFill, Trajectory};
use crate::{Error, Result};
use flow::MinCostFlow;

/// Integer cost units per dB.
pub const UNITS_PER_DB: f64 = 1e6;

pub const BRUTE_MAX_USERS: usize = 8;
pub const BRUTE_MAX_DCS: usize = 3;
pub const BRUTE_MAX_SLOTS: usize = 12;

/// Rounds a dB cost to integer units.
pub fn to_units(db: f64) -> i64 {
    (db * UNITS_PER_DB).round() as i64
}

/// `c[u][d]`: cost of serving user `u` from DC `d` for a whole period.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    pub c: Vec<Vec<f64>>,
}

impl CostMatrix {
    pub fn new(c: Vec<Vec<f64>>) -> Self {
        Self { c }
    }

    pub fn num_users(&self) -> usize {
        self.c.len()
    }

    pub fn num_dcs(&self) -> usize {
        self.c.first().map_or(0, Vec::len)
    }

    pub fn total(&self, a: &Association) -> f64 {
        a.dc_of.iter().enumerate().map(|(u, &d)| self.c[u][d]).sum()
    }

    pub fn total_units(&self, a: &Association) -> i64 {
        a.dc_of.iter().enumerate().map(|(u, &d)| to_units(self.c[u][d])).sum()
    }
}

/// `w[u][d][n]`: cost of DC `d` serving user `u` in slot `n`; `+inf` where
/// `u` is not associated with `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotCostTensor {
    pub w: Vec<Vec<Vec<f64>>>,
}

impl SlotCostTensor {
    pub fn new(w: Vec<Vec<Vec<f64>>>) -> Self {
        Self { w }
    }

    pub fn num_users(&self) -> usize {
        self.w.len()
    }

    pub fn total(&self, k: &Schedule) -> f64 {
        let mut sum = 0.0;
        for (d, row) in k.served.iter().enumerate() {
            for (n, &cell) in row.iter().enumerate() {
                if let Some(u) = cell {
                    sum += self.w[u][d][n];
                }
            }
        }
        sum
    }

    pub fn total_units(&self, k: &Schedule) -> i64 {
        let mut sum = 0;
        for (d, row) in k.served.iter().enumerate() {
            for (n, &cell) in row.iter().enumerate() {
                if let Some(u) = cell {
                    sum += to_units(self.w[u][d][n]);
                }
            }
        }
        sum
    }
}

/// Per-slot costs for the fixed trajectory and association.
pub fn slot_costs(s: &Scenario, traj: &Trajectory, assoc: &Association) -> SlotCostTensor {
    let w = (0..s.num_users())
        .map(|u| {
            (0..s.num_dcs)
                .map(|d| {
                    (0..s.num_slots)
                        .map(|n| if assoc.is_associated(u, d) { slot_pathloss(s, u, traj.point(d, n)) } else { f64::INFINITY })
                        .collect()
                })
                .collect()
        })
        .collect();
    SlotCostTensor::new(w)
}

/// Association costs: each user keeps its current slot pattern whichever
/// DC serves it, so `c[u][d]` sums the pathloss from `d` over the slots
/// in which `u` is currently served.
pub fn association_costs(s: &Scenario, traj: &Trajectory, sched: &Schedule) -> CostMatrix {
    let patterns = sched.user_patterns(s.num_users());
    let c = (0..s.num_users())
        .map(|u| {
            (0..s.num_dcs)
                .map(|d| {
                    (0..s.num_slots)
                        .filter(|&n| patterns[u][n])
                        .map(|n| slot_pathloss(s, u, traj.point(d, n)))
                        .sum()
                })
                .collect()
        })
        .collect();
    CostMatrix::new(c)
}

/// Single-slot costs for DCs hovering at fixed points.
pub fn static_costs(s: &Scenario, points: &[Waypoint]) -> CostMatrix {
    let c = s
        .users
        .iter()
        .map(|&user| points.iter().map(|p| u2d_db(p.horizontal().dist(user), p.h, &s.u2d)).collect())
        .collect();
    CostMatrix::new(c)
}

/// Minimum-cost association with at most `n_u` users per DC.
pub fn solve_association(cost: &CostMatrix, n_u: usize) -> Result<Association> {
    let (nu, nd) = (cost.num_users(), cost.num_dcs());
    if nu == 0 {
        return Ok(Association::new(Vec::new()));
    }
    if nd == 0 || n_u * nd < nu {
        return Err(Error::Infeasible(format!("{nd} DCs with {n_u} users each cannot serve {nu} users")));
    }
    let m = (nu * nd + 1) as i64;
    let (src, sink) = (0, nu + nd + 1);
    let mut g = MinCostFlow::new(nu + nd + 2);
    let mut ids = vec![vec![None; nd]; nu];
    for u in 0..nu {
        g.add_edge(src, 1 + u, 1, 0);
        for d in 0..nd {
            if cost.c[u][d].is_finite() {
                ids[u][d] = Some(g.add_edge(1 + u, 1 + nu + d, 1, to_units(cost.c[u][d]) * m + d as i64));
            }
        }
    }
    for d in 0..nd {
        g.add_edge(1 + nu + d, sink, n_u as i64, 0);
    }
    let (sent, _) = g.run(src, sink, nu as i64);
    if sent < nu as i64 {
        return Err(Error::Infeasible(format!("only {sent} of {nu} users can be associated")));
    }
    let dc_of = ids
        .iter()
        .map(|row| row.iter().position(|e| e.is_some_and(|e| g.flow_on(e) > 0)).expect("every user carries one unit"))
        .collect();
    Ok(Association::new(dc_of))
}

/// Minimum-cost schedule for a fixed association, solved DC by DC.
pub fn solve_scheduling(
    w: &SlotCostTensor,
    assoc: &Association,
    s_min: usize,
    num_slots: usize,
    fill: ScheduleFill,
) -> Result<Schedule> {
    let num_dcs = w.w.first().map_or(0, Vec::len);
    let mut sched = Schedule::idle(num_dcs, num_slots);
    for d in 0..num_dcs {
        sched.served[d] = schedule_dc(w, &assoc.users_of(d), d, s_min, num_slots, fill)?;
    }
    Ok(sched)
}

fn check_slots(d: usize, users: usize, s_min: usize, num_slots: usize) -> Result<()> {
    if s_min * users > num_slots {
        return Err(Error::Infeasible(format!(
            "DC {d} needs {} slots for {users} users but has {num_slots}",
            s_min * users
        )));
    }
    Ok(())
}

fn schedule_dc(
    w: &SlotCostTensor,
    users: &[usize],
    d: usize,
    s_min: usize,
    n: usize,
    fill: ScheduleFill,
) -> Result<Vec<Option<usize>>> {
    let k = users.len();
    if k == 0 {
        return Ok(vec![None; n]);
    }
    check_slots(d, k, s_min, n)?;
    let m = (n * n * k + 1) as i64;
    let (src, sink) = (0, 1 + k + n);
    let mut g = MinCostFlow::new(k + n + 2);
    let mut ids = vec![vec![None; n]; k];
    let mut positive = 0i64;
    for (i, &u) in users.iter().enumerate() {
        for slot in 0..n {
            let c = w.w[u][d][slot];
            if c.is_finite() {
                let cost = to_units(c) * m + (slot * k + i) as i64;
                positive += cost.max(0);
                ids[i][slot] = Some(g.add_edge(1 + i, 1 + k + slot, 1, cost));
            }
        }
    }
    let big = positive + 1;
    for i in 0..k {
        match fill {
            ScheduleFill::Minimal => {
                g.add_edge(src, 1 + i, s_min as i64, 0);
            }
            ScheduleFill::Full => {
                g.add_edge(src, 1 + i, s_min as i64, -big);
                g.add_edge(src, 1 + i, n as i64, 0);
            }
        }
    }
    for slot in 0..n {
        g.add_edge(1 + k + slot, sink, 1, 0);
    }
    let want = match fill {
        ScheduleFill::Minimal => (s_min * k) as i64,
        ScheduleFill::Full => n as i64,
    };
    let (sent, _) = g.run(src, sink, want);
    let mut row = vec![None; n];
    let mut counts = vec![0usize; k];
    for (i, &u) in users.iter().enumerate() {
        for slot in 0..n {
            if ids[i][slot].is_some_and(|e| g.flow_on(e) > 0) {
                row[slot] = Some(u);
                counts[i] += 1;
            }
        }
    }
    if sent < want || counts.iter().any(|&c| c < s_min) {
        return Err(Error::Infeasible(format!("DC {d} cannot give every user {s_min} usable slots")));
    }
    Ok(row)
}

/// Exhaustive association search over all `|D|^|U|` assignments.
pub fn brute_force_association(cost: &CostMatrix, n_u: usize) -> Result<Association> {
    let (nu, nd) = (cost.num_users(), cost.num_dcs());
    if nu > BRUTE_MAX_USERS || nd > BRUTE_MAX_DCS {
        return Err(Error::SizeGuard(format!("{nu} users x {nd} DCs")));
    }
    if nu == 0 {
        return Ok(Association::new(Vec::new()));
    }
    let mut best: Option<(i64, Vec<usize>)> = None;
    let mut cur = vec![0usize; nu];
    let total = (nd as u64).pow(nu as u32);
    for code in 0..total {
        let mut x = code;
        for slot in cur.iter_mut() {
            *slot = (x % nd as u64) as usize;
            x /= nd as u64;
        }
        if (0..nd).any(|d| cur.iter().filter(|&&y| y == d).count() > n_u) {
            continue;
        }
        if cur.iter().enumerate().any(|(u, &d)| !cost.c[u][d].is_finite()) {
            continue;
        }
        let c: i64 = cur.iter().enumerate().map(|(u, &d)| to_units(cost.c[u][d])).sum();
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, cur.clone()));
        }
    }
    best.map(|(_, a)| Association::new(a))
        .ok_or_else(|| Error::Infeasible("no assignment respects the DC capacity".into()))
}

/// Exact schedule by exhaustive search over slot assignments, with states
/// merged by per-user slot counts capped at `s_min`.
pub fn brute_force_schedule(
    w: &SlotCostTensor,
    assoc: &Association,
    s_min: usize,
    num_slots: usize,
    fill: ScheduleFill,
) -> Result<Schedule> {
    let num_dcs = w.w.first().map_or(0, Vec::len);
    if w.num_users() > BRUTE_MAX_USERS || num_dcs > BRUTE_MAX_DCS || num_slots > BRUTE_MAX_SLOTS {
        return Err(Error::SizeGuard(format!("{} users x {num_dcs} DCs x {num_slots} slots", w.num_users())));
    }
    let mut sched = Schedule::idle(num_dcs, num_slots);
    for d in 0..num_dcs {
        let users = assoc.users_of(d);
        if users.is_empty() {
            continue;
        }
        check_slots(d, users.len(), s_min, num_slots)?;
        sched.served[d] = brute_force_dc(w, &users, d, s_min, num_slots, fill)
            .ok_or_else(|| Error::Infeasible(format!("DC {d} has no feasible schedule")))?;
    }
    Ok(sched)
}

fn brute_force_dc(
    w: &SlotCostTensor,
    users: &[usize],
    d: usize,
    s_min: usize,
    n: usize,
    fill: ScheduleFill,
) -> Option<Vec<Option<usize>>> {
    let k = users.len();
    let base = s_min + 1;
    let states = base.pow(k as u32);
    let digit = |state: usize, i: usize| (state / base.pow(i as u32)) % base;
    // best[n][state]: cheapest way to fill slots 0..n reaching `state`
    let mut best = vec![vec![None::<i64>; states]; n + 1];
    let mut choice = vec![vec![(0usize, None::<usize>); states]; n + 1];
    best[0][0] = Some(0);
    for slot in 0..n {
        for state in 0..states {
            let Some(c0) = best[slot][state] else { continue };
            let mut relax = |next: usize, c: i64, pick: Option<usize>| {
                if best[slot + 1][next].is_none_or(|b| c < b) {
                    best[slot + 1][next] = Some(c);
                    choice[slot + 1][next] = (state, pick);
                }
            };
            if fill == ScheduleFill::Minimal {
                relax(state, c0, None);
            }
            for (i, &u) in users.iter().enumerate() {
                let cost = w.w[u][d][slot];
                if !cost.is_finite() {
                    continue;
                }
                let next = if digit(state, i) < s_min { state + base.pow(i as u32) } else { state };
                relax(next, c0 + to_units(cost), Some(i));
            }
        }
    }
    let goal = states - 1;
    best[n][goal]?;
    let mut row = vec![None; n];
    let mut state = goal;
    for slot in (0..n).rev() {
        let (prev, pick) = choice[slot + 1][state];
        row[slot] = pick.map(|i| users[i]);
        state = prev;
    }
    Some(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quantised(rng: &mut ChaCha8Rng) -> f64 {
        (rng.gen_range(0.0..100.0f64) * 1e3).round() / 1e3
    }

    #[test]
    fn single_dc_takes_everyone() {
        let cost = CostMatrix::new(vec![vec![3.0]; 4]);
        assert_eq!(solve_association(&cost, 4).unwrap().dc_of, vec![0; 4]);
    }

    #[test]
    fn association_worked_example() {
        let cost = CostMatrix::new(vec![vec![1.0, 9.0], vec![9.0, 1.0], vec![5.0, 5.0]]);
        let a = solve_association(&cost, 2).unwrap();
        assert_eq!(a.dc_of, vec![0, 1, 0]);
        assert_eq!(cost.total(&a), 7.0);
        let b = brute_force_association(&cost, 2).unwrap();
        assert_eq!(cost.total(&b), 7.0);
    }

    #[test]
    fn association_capacity_binds() {
        let cost = CostMatrix::new(vec![vec![1.0, 9.0]; 3]);
        let a = solve_association(&cost, 2).unwrap();
        assert_eq!(a.load(0), 2);
        assert!(matches!(solve_association(&cost, 1), Err(Error::Infeasible(_))));
    }

    #[test]
    fn association_matches_enumeration_6x3() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let cost = CostMatrix::new((0..6).map(|_| (0..3).map(|_| quantised(&mut rng)).collect()).collect());
            let a = solve_association(&cost, 3).unwrap();
            let b = brute_force_association(&cost, 3).unwrap();
            assert_eq!(cost.total_units(&a), cost.total_units(&b));
            assert!((0..3).all(|d| a.load(d) <= 3));
        }
    }

    fn one_dc(rows: &[&[f64]]) -> SlotCostTensor {
        SlotCostTensor::new(rows.iter().map(|r| vec![r.to_vec()]).collect())
    }

    #[test]
    fn forced_schedule() {
        let w = one_dc(&[&[2.0, 3.0, 4.0, 5.0]]);
        let a = Association::new(vec![0]);
        for fill in [ScheduleFill::Minimal, ScheduleFill::Full] {
            let k = solve_scheduling(&w, &a, 4, 4, fill).unwrap();
            assert_eq!(k.served[0], vec![Some(0); 4]);
        }
    }

    #[test]
    fn schedule_worked_example() {
        let w = one_dc(&[&[1.0, 1.0, 9.0, 9.0, 20.0], &[9.0, 9.0, 1.0, 1.0, 20.0]]);
        let a = Association::new(vec![0, 0]);
        let k = solve_scheduling(&w, &a, 2, 5, ScheduleFill::Minimal).unwrap();
        assert_eq!(k.served[0], vec![Some(0), Some(0), Some(1), Some(1), None]);
        let full = solve_scheduling(&w, &a, 2, 5, ScheduleFill::Full).unwrap();
        assert_eq!(full.served[0], vec![Some(0), Some(0), Some(1), Some(1), Some(0)]);
        for fill in [ScheduleFill::Minimal, ScheduleFill::Full] {
            let got = solve_scheduling(&w, &a, 2, 5, fill).unwrap();
            let want = brute_force_schedule(&w, &a, 2, 5, fill).unwrap();
            assert_eq!(w.total_units(&got), w.total_units(&want));
        }
    }

    #[test]
    fn schedule_ties_prefer_earlier_slots() {
        let w = one_dc(&[&[1.0; 6]]);
        let k = solve_scheduling(&w, &Association::new(vec![0]), 2, 6, ScheduleFill::Minimal).unwrap();
        assert_eq!(k.served[0], vec![Some(0), Some(0), None, None, None, None]);
    }

    #[test]
    fn schedule_matches_enumeration_3x10() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = Association::new(vec![0, 0, 0]);
        for _ in 0..30 {
            let w = SlotCostTensor::new((0..3).map(|_| vec![(0..10).map(|_| quantised(&mut rng)).collect()]).collect());
            for fill in [ScheduleFill::Minimal, ScheduleFill::Full] {
                let s_min = rng.gen_range(1..=3);
                let got = solve_scheduling(&w, &a, s_min, 10, fill).unwrap();
                let want = brute_force_schedule(&w, &a, s_min, 10, fill).unwrap();
                assert_eq!(w.total_units(&got), w.total_units(&want));
            }
        }
    }

    #[test]
    fn too_few_slots() {
        let w = one_dc(&[&[1.0; 5], &[1.0; 5], &[1.0; 5]]);
        let a = Association::new(vec![0, 0, 0]);
        assert!(matches!(solve_scheduling(&w, &a, 2, 5, ScheduleFill::Full), Err(Error::Infeasible(_))));
        assert!(matches!(brute_force_schedule(&w, &a, 2, 5, ScheduleFill::Full), Err(Error::Infeasible(_))));
    }

    #[test]
    fn size_guards() {
        let cost = CostMatrix::new(vec![vec![1.0; 2]; 9]);
        assert!(matches!(brute_force_association(&cost, 9), Err(Error::SizeGuard(_))));
        let w = one_dc(&[&[1.0; 13]]);
        let a = Association::new(vec![0]);
        assert!(matches!(brute_force_schedule(&w, &a, 1, 13, ScheduleFill::Full), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn one_by_one() {
        let cost = CostMatrix::new(vec![vec![4.0]]);
        assert_eq!(brute_force_association(&cost, 1).unwrap().dc_of, vec![0]);
        let w = one_dc(&[&[1.0]]);
        let k = brute_force_schedule(&w, &Association::new(vec![0]), 1, 1, ScheduleFill::Minimal).unwrap();
        assert_eq!(k.served[0], vec![Some(0)]);
    }

    #[test]
    fn non_associated_pairs_are_never_scheduled() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = Association::new(vec![0, 1, 1, 0, 1]);
        let w = SlotCostTensor::new(
            (0..5)
                .map(|u| {
                    (0..2)
                        .map(|d| (0..8).map(|_| if a.dc_of[u] == d { quantised(&mut rng) } else { f64::INFINITY }).collect())
                        .collect()
                })
                .collect(),
        );
        let k = solve_scheduling(&w, &a, 2, 8, ScheduleFill::Full).unwrap();
        for (d, row) in k.served.iter().enumerate() {
            assert!(row.iter().all(|c| c.is_some_and(|u| a.dc_of[u] == d)));
        }
        assert!(w.total(&k).is_finite());
    }
}

//! Static-deployment baseline: per-drone iterated particle swarm
//! optimization of one fixed hover point per DC.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assign::{solve_association, static_costs};
use crate::bcd::feasible_start;
use crate::channel::{d2b_db_clamped, u2d_db};
use crate::geom::{Vec2, Waypoint};
use crate::model::{evaluate_objective, initial_schedule, Association, Scenario, ScheduleFill, Solution, Trajectory};
use crate::{Error, Result};

const REPAIR_STEPS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsoOptions {
    pub swarm_size: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub iterations_per_drone: usize,
    pub outer_rounds: usize,
    pub seed: u64,
}

impl Default for PsoOptions {
    fn default() -> Self {
        Self {
            swarm_size: 40,
            inertia: 0.729,
            cognitive: 1.494,
            social: 1.494,
            iterations_per_drone: 200,
            outer_rounds: 10,
            seed: 0,
        }
    }
}

impl PsoOptions {
    pub fn validate(&self) -> Result<()> {
        let counts = self.swarm_size > 0 && self.iterations_per_drone > 0 && self.outer_rounds > 0;
        let coeffs = self.inertia > 0.0 && self.cognitive > 0.0 && self.social > 0.0;
        if !(counts && coeffs) {
            return Err(Error::InvalidScenario(format!("PSO options must be positive: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticDeployment {
    pub positions: Vec<Waypoint>,
    pub assoc: Association,
}

fn feasible(s: &Scenario, p: Waypoint) -> bool {
    !s.l_db.is_finite() || d2b_db_clamped(p.horizontal().norm(), p.h, &s.d2b) <= s.l_db
}

/// Moves an infeasible point into the backhaul region: down toward the
/// altitude floor if the floor is feasible there, otherwise toward the BS
/// along its radius at the floor.
fn repair(s: &Scenario, p: Waypoint) -> Waypoint {
    if feasible(s, p) {
        return p;
    }
    let floor = Waypoint::at(p.horizontal(), s.h_min);
    if feasible(s, floor) {
        let (mut good, mut bad) = (s.h_min, p.h);
        for _ in 0..REPAIR_STEPS {
            let mid = 0.5 * (good + bad);
            if feasible(s, Waypoint::at(p.horizontal(), mid)) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        return Waypoint::at(p.horizontal(), good);
    }
    let (mut good, mut bad) = (0.0, 1.0);
    for _ in 0..REPAIR_STEPS {
        let mid = 0.5 * (good + bad);
        if feasible(s, Waypoint::at(p.horizontal() * mid, s.h_min)) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Waypoint::at(p.horizontal() * good, s.h_min)
}

fn clamp_to_domain(s: &Scenario, p: Waypoint) -> Waypoint {
    let mut pos = p.horizontal();
    let r = pos.norm();
    if r > s.r_bs {
        pos = pos * (s.r_bs / r);
    }
    Waypoint::at(pos, p.h.clamp(s.h_min, s.limits.h_cap))
}

fn fitness(s: &Scenario, users: &[usize], p: Waypoint) -> f64 {
    users.iter().map(|&u| u2d_db(p.horizontal().dist(s.users[u]), p.h, &s.u2d)).sum()
}

/// PSO for one drone. Particle 0 starts at `start`, so the returned point
/// is never worse than it. Returns the best point and the global-best cost
/// after every iteration.
pub fn optimize_drone(
    s: &Scenario,
    users: &[usize],
    start: Waypoint,
    opts: &PsoOptions,
    rng: &mut ChaCha8Rng,
) -> (Waypoint, Vec<f64>) {
    let random_point = |rng: &mut ChaCha8Rng| {
        let r = s.r_bs * rng.gen::<f64>().sqrt();
        let ang = rng.gen_range(0.0..std::f64::consts::TAU);
        let h = rng.gen_range(s.h_min..=s.limits.h_cap.max(s.h_min));
        repair(s, Waypoint::at(Vec2::from_polar(r, ang), h))
    };
    let mut pos: Vec<Waypoint> = (0..opts.swarm_size)
        .map(|i| if i == 0 { start } else { random_point(rng) })
        .collect();
    let mut vel = vec![[0.0f64; 3]; opts.swarm_size];
    let mut best_pos = pos.clone();
    let mut best_cost: Vec<f64> = pos.iter().map(|&p| fitness(s, users, p)).collect();
    let mut g = (0..opts.swarm_size).min_by(|&a, &b| best_cost[a].total_cmp(&best_cost[b])).unwrap_or(0);
    let mut trace = Vec::with_capacity(opts.iterations_per_drone);
    for _ in 0..opts.iterations_per_drone {
        for i in 0..opts.swarm_size {
            let here = [pos[i].x, pos[i].y, pos[i].h];
            let own = [best_pos[i].x, best_pos[i].y, best_pos[i].h];
            let swarm = [best_pos[g].x, best_pos[g].y, best_pos[g].h];
            let mut next = [0.0; 3];
            for k in 0..3 {
                let (r1, r2): (f64, f64) = (rng.gen(), rng.gen());
                vel[i][k] = opts.inertia * vel[i][k]
                    + opts.cognitive * r1 * (own[k] - here[k])
                    + opts.social * r2 * (swarm[k] - here[k]);
                next[k] = here[k] + vel[i][k];
            }
            let p = repair(s, clamp_to_domain(s, Waypoint::new(next[0], next[1], next[2])));
            pos[i] = p;
            let c = fitness(s, users, p);
            if c < best_cost[i] {
                best_cost[i] = c;
                best_pos[i] = p;
                if c < best_cost[g] {
                    g = i;
                }
            }
        }
        trace.push(best_cost[g]);
    }
    (best_pos[g], trace)
}

/// Per-drone iterated PSO: drones are optimized one at a time against
/// their current users, re-solving the association after each drone.
pub fn solve_static(s: &Scenario, opts: &PsoOptions) -> Result<StaticDeployment> {
    s.validate()?;
    opts.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut positions: Vec<Waypoint> = feasible_start(s)?.paths.iter().map(|p| p[0]).collect();
    let mut assoc = solve_association(&static_costs(s, &positions), s.n_u)?;
    for round in 0..opts.outer_rounds {
        let mut changed = false;
        for d in 0..s.num_dcs {
            let users = assoc.users_of(d);
            if users.is_empty() {
                continue;
            }
            let (p, _) = optimize_drone(s, &users, positions[d], opts, &mut rng);
            if p != positions[d] {
                positions[d] = p;
                changed = true;
            }
            let next = solve_association(&static_costs(s, &positions), s.n_u)?;
            if next != assoc {
                assoc = next;
                changed = true;
            }
        }
        log::debug!("PSO round {round}: changed = {changed}");
        if !changed {
            break;
        }
    }
    Ok(StaticDeployment { positions, assoc })
}

/// The deployment as a constant trajectory with the round-robin schedule,
/// cut to `s_min` slots per user under [`ScheduleFill::Minimal`].
pub fn static_as_trajectory(dep: &StaticDeployment, s: &Scenario, fill: ScheduleFill) -> Result<Solution> {
    let trajectory = Trajectory::stationary(&dep.positions, s.num_slots);
    let mut sched = initial_schedule(s, &dep.assoc)?;
    if fill == ScheduleFill::Minimal {
        for row in &mut sched.served {
            let mut seen = vec![0usize; s.num_users()];
            for cell in row.iter_mut() {
                if let Some(u) = *cell {
                    seen[u] += 1;
                    if seen[u] > s.s_min {
                        *cell = None;
                    }
                }
            }
        }
    }
    let objective = evaluate_objective(s, &trajectory, &dep.assoc, &sched);
    Ok(Solution { trajectory, assoc: dep.assoc.clone(), sched, objective, history: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_scenario, validate_solution, ScenarioOverrides};

    fn quick() -> PsoOptions {
        PsoOptions { swarm_size: 20, iterations_per_drone: 60, outer_rounds: 3, ..PsoOptions::default() }
    }

    #[test]
    fn single_user_hover_point() {
        let o = ScenarioOverrides { n_u: Some(1), l_db: Some(f64::INFINITY), ..Default::default() };
        let mut s = generate_scenario(3, 1, 1, &o).unwrap();
        s.users[0] = Vec2::new(-200.0, 350.0);
        let dep = solve_static(&s, &PsoOptions::default()).unwrap();
        let p = dep.positions[0];
        assert!(p.horizontal().dist(s.users[0]) < 1.0, "{p:?}");
        assert!((p.h - s.h_min).abs() < 1.0);
    }

    #[test]
    fn co_located_users_attract_all_drones() {
        let o = ScenarioOverrides { l_db: Some(f64::INFINITY), ..Default::default() };
        let mut s = generate_scenario(3, 6, 2, &o).unwrap();
        let spot = Vec2::new(150.0, -100.0);
        s.users = vec![spot; 6];
        let dep = solve_static(&s, &PsoOptions::default()).unwrap();
        for d in 0..2 {
            if dep.assoc.load(d) > 0 {
                assert!(dep.positions[d].horizontal().dist(spot) < 1.0);
            }
        }
    }

    #[test]
    fn global_best_is_non_increasing_and_positions_feasible() {
        let s = generate_scenario(5, 20, 5, &ScenarioOverrides::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let users: Vec<usize> = (0..5).collect();
        let start = feasible_start(&s).unwrap().paths[0][0];
        let (p, trace) = optimize_drone(&s, &users, start, &quick(), &mut rng);
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(fitness(&s, &users, p) <= fitness(&s, &users, start));
        let dep = solve_static(&s, &quick()).unwrap();
        for p in &dep.positions {
            assert!(d2b_db_clamped(p.horizontal().norm(), p.h, &s.d2b) <= s.l_db + 1e-6);
        }
    }

    #[test]
    fn repair_lands_in_backhaul_region() {
        let s = generate_scenario(5, 4, 2, &ScenarioOverrides::default()).unwrap();
        for p in [Waypoint::new(800.0, 0.0, 400.0), Waypoint::new(-300.0, 300.0, 42.0), Waypoint::new(10.0, 5.0, 900.0)] {
            assert!(feasible(&s, repair(&s, p)));
        }
    }

    #[test]
    fn seeded_determinism() {
        let s = generate_scenario(8, 10, 3, &ScenarioOverrides::default()).unwrap();
        assert_eq!(solve_static(&s, &quick()).unwrap(), solve_static(&s, &quick()).unwrap());
    }

    #[test]
    fn static_solution_is_feasible_and_matches_static_pathloss() {
        let s = generate_scenario(6, 12, 3, &ScenarioOverrides::default()).unwrap();
        let dep = solve_static(&s, &quick()).unwrap();
        for fill in [ScheduleFill::Minimal, ScheduleFill::Full] {
            let sol = static_as_trajectory(&dep, &s, fill).unwrap();
            assert!(validate_solution(&s, &sol).is_empty());
            let mut want = 0.0;
            for (u, &d) in dep.assoc.dc_of.iter().enumerate() {
                let p = dep.positions[d];
                want += sol.sched.slot_count(u, d) as f64 * u2d_db(p.horizontal().dist(s.users[u]), p.h, &s.u2d);
            }
            assert!((sol.objective - want).abs() < 1e-6);
        }
    }

    #[test]
    fn single_pair_objective_depends_on_fill() {
        let o = ScenarioOverrides { n_u: Some(1), ..Default::default() };
        let s = generate_scenario(2, 1, 1, &o).unwrap();
        let dep = StaticDeployment { positions: vec![Waypoint::new(0.0, 0.0, 40.0)], assoc: Association::new(vec![0]) };
        let l = u2d_db(s.users[0].norm(), 40.0, &s.u2d);
        let min = static_as_trajectory(&dep, &s, ScheduleFill::Minimal).unwrap();
        let full = static_as_trajectory(&dep, &s, ScheduleFill::Full).unwrap();
        assert!((min.objective - s.s_min as f64 * l).abs() < 1e-9);
        assert!((full.objective - s.num_slots as f64 * l).abs() < 1e-9);
    }
}

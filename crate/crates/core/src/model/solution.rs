use serde::{Deserialize, Serialize};

use crate::geom::Waypoint;

/// Closed 3D trajectories: `paths[d][n]` is DC `d` at slot `n`. Slot
/// `N - 1` is followed by slot `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub paths: Vec<Vec<Waypoint>>,
}

impl Trajectory {
    pub fn new(paths: Vec<Vec<Waypoint>>) -> Self {
        Self { paths }
    }

    /// Every DC hovering at its own fixed point for `num_slots` slots.
    pub fn stationary(points: &[Waypoint], num_slots: usize) -> Self {
        Self::new(points.iter().map(|&p| vec![p; num_slots]).collect())
    }

    pub fn num_dcs(&self) -> usize {
        self.paths.len()
    }

    pub fn num_slots(&self) -> usize {
        self.paths.first().map_or(0, Vec::len)
    }

    pub fn point(&self, d: usize, n: usize) -> Waypoint {
        self.paths[d][n]
    }

    /// Largest per-slot 3D displacement between two trajectories of equal
    /// shape.
    pub fn max_displacement(&self, other: &Trajectory) -> f64 {
        self.paths
            .iter()
            .zip(&other.paths)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(p, q)| p.dist(*q)))
            .fold(0.0, f64::max)
    }
}

/// Cyclic slot neighbours `(n - 1, n + 1)`.
pub(crate) fn neighbours(n: usize, num_slots: usize) -> (usize, usize) {
    ((n + num_slots - 1) % num_slots, (n + 1) % num_slots)
}

/// User-to-DC association: `dc_of[u]` serves user `u` for the whole period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Association {
    pub dc_of: Vec<usize>,
}

impl Association {
    pub fn new(dc_of: Vec<usize>) -> Self {
        Self { dc_of }
    }

    pub fn num_users(&self) -> usize {
        self.dc_of.len()
    }

    /// Users of DC `d`, in increasing index order.
    pub fn users_of(&self, d: usize) -> Vec<usize> {
        (0..self.dc_of.len()).filter(|&u| self.dc_of[u] == d).collect()
    }

    pub fn load(&self, d: usize) -> usize {
        self.dc_of.iter().filter(|&&x| x == d).count()
    }

    pub fn is_associated(&self, u: usize, d: usize) -> bool {
        self.dc_of.get(u) == Some(&d)
    }
}

/// TDMA schedule: `served[d][n]` is the user DC `d` serves in slot `n`.
/// At most one user per DC and slot holds by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub served: Vec<Vec<Option<usize>>>,
}

impl Schedule {
    pub fn idle(num_dcs: usize, num_slots: usize) -> Self {
        Self {
            served: vec![vec![None; num_slots]; num_dcs],
        }
    }

    pub fn num_slots(&self) -> usize {
        self.served.first().map_or(0, Vec::len)
    }

    /// Number of slots in which DC `d` serves user `u`.
    pub fn slot_count(&self, u: usize, d: usize) -> usize {
        self.served[d].iter().filter(|&&s| s == Some(u)).count()
    }

    /// Slots in which `u` is served by any DC.
    pub fn slots_of_user(&self, u: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (d, row) in self.served.iter().enumerate() {
            for (n, &s) in row.iter().enumerate() {
                if s == Some(u) {
                    out.push((d, n));
                }
            }
        }
        out.sort_by_key(|&(d, n)| (n, d));
        out
    }

    /// Per-user slot masks, independent of the serving DC.
    pub fn user_patterns(&self, num_users: usize) -> Vec<Vec<bool>> {
        let n = self.num_slots();
        let mut out = vec![vec![false; n]; num_users];
        for row in &self.served {
            for (slot, &s) in row.iter().enumerate() {
                if let Some(u) = s {
                    if u < num_users {
                        out[u][slot] = true;
                    }
                }
            }
        }
        out
    }
}

/// Whether slots beyond each user's minimum are handed out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleFill {
    /// Exactly `s_min` slots per user; remaining slots stay idle.
    Minimal,
    /// Every slot of a DC with users goes to one of them.
    #[default]
    Full,
}

impl std::str::FromStr for ScheduleFill {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "minimal" => Ok(Self::Minimal),
            "full" => Ok(Self::Full),
            other => Err(format!("unknown schedule fill '{other}' (expected minimal|full)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Objective after the iteration, dB summed over scheduled slots.
    pub objective: f64,
    /// Largest per-slot trajectory displacement in the iteration, m.
    pub delta_g: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub trajectory: Trajectory,
    pub assoc: Association,
    pub sched: Schedule,
    pub objective: f64,
    pub history: Vec<IterationRecord>,
}

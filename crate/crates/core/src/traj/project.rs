use crate::geom::Vec2;

/// Iterations stop once a full Dykstra cycle moves less than this, m.
pub const PROJECTION_TOL: f64 = 1e-4;
pub const PROJECTION_MAX_ITER: usize = 10_000;
/// Slack allowed when testing membership of a disk, m.
pub const INSIDE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskConstraint {
    pub center: Vec2,
    pub radius: f64,
}

impl DiskConstraint {
    pub fn new(center: Vec2, radius: f64) -> Self {
        debug_assert!(radius >= 0.0);
        Self { center, radius }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.dist(self.center) <= self.radius + INSIDE_TOL
    }

    pub fn project(&self, p: Vec2) -> Vec2 {
        let off = p - self.center;
        let len = off.norm();
        if len <= self.radius {
            p
        } else {
            self.center + off * (self.radius / len)
        }
    }
}

fn inside_all(disks: &[DiskConstraint], p: Vec2) -> bool {
    disks.iter().all(|d| d.contains(p))
}

/// Euclidean projection of `target` onto the intersection of `disks`.
///
/// Runs Dykstra's alternating projections from `target`. `start` must lie
/// in every disk; if the last iterate is still marginally outside, the
/// result is pulled back along the segment from `start`, so the returned
/// point is always inside every disk.
pub fn project_horizontal(target: Vec2, disks: &[DiskConstraint], start: Vec2) -> Vec2 {
    if inside_all(disks, target) {
        return target;
    }
    if let [only] = disks {
        return only.project(target);
    }
    let mut x = target;
    let mut incr = vec![Vec2::ZERO; disks.len()];
    for _ in 0..PROJECTION_MAX_ITER {
        let before = x;
        for (disk, inc) in disks.iter().zip(incr.iter_mut()) {
            let y = x + *inc;
            let p = disk.project(y);
            *inc = y - p;
            x = p;
        }
        if x.dist(before) < PROJECTION_TOL {
            break;
        }
    }
    if inside_all(disks, x) {
        return x;
    }
    let (mut good, mut bad) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (good + bad);
        if inside_all(disks, start + (x - start) * mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    start + (x - start) * good
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Best point of a 400 x 400 grid over the smallest disk's bounding box.
    pub(crate) fn grid_oracle(target: Vec2, disks: &[DiskConstraint]) -> Option<Vec2> {
        let box_disk = disks.iter().min_by(|a, b| a.radius.total_cmp(&b.radius))?;
        let mut best: Option<(f64, Vec2)> = None;
        for i in 0..400 {
            for j in 0..400 {
                let p = Vec2::new(
                    box_disk.center.x - box_disk.radius + 2.0 * box_disk.radius * i as f64 / 399.0,
                    box_disk.center.y - box_disk.radius + 2.0 * box_disk.radius * j as f64 / 399.0,
                );
                if disks.iter().all(|d| p.dist(d.center) <= d.radius) {
                    let c = p.dist(target);
                    if best.is_none_or(|(b, _)| c < b) {
                        best = Some((c, p));
                    }
                }
            }
        }
        best.map(|(_, p)| p)
    }

    #[test]
    fn inside_target_is_fixed() {
        let disks = [DiskConstraint::new(Vec2::ZERO, 10.0), DiskConstraint::new(Vec2::new(5.0, 0.0), 10.0)];
        let t = Vec2::new(2.0, 1.0);
        assert_eq!(project_horizontal(t, &disks, Vec2::ZERO), t);
    }

    #[test]
    fn single_disk_closed_form() {
        let c = Vec2::new(1.0, 2.0);
        let disk = DiskConstraint::new(c, 3.0);
        let t = Vec2::new(10.0, -5.0);
        let got = project_horizontal(t, &[disk], c);
        let want = c + (t - c) * (3.0 / (t - c).norm());
        assert!(got.dist(want) < 1e-12);
    }

    #[test]
    fn two_disks_match_grid_oracle() {
        let disks = [DiskConstraint::new(Vec2::ZERO, 90.0), DiskConstraint::new(Vec2::new(120.0, 0.0), 90.0)];
        let start = Vec2::new(60.0, 0.0);
        let t = Vec2::new(60.0, 300.0);
        let got = project_horizontal(t, &disks, start);
        let oracle = grid_oracle(t, &disks).unwrap();
        assert!(got.dist(t) <= oracle.dist(t) + 1e-2);
        assert!(disks.iter().all(|d| got.dist(d.center) <= d.radius + 1e-6));
        // the two circles meet at (60, +-sqrt(90^2 - 60^2))
        assert!(got.dist(Vec2::new(60.0, (90.0f64 * 90.0 - 3600.0).sqrt())) < 1e-2);
    }

    #[test]
    fn random_instances_match_grid_oracle_and_are_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let start = Vec2::new(rng.gen_range(-300.0..300.0), rng.gen_range(-300.0..300.0));
            let disks: Vec<DiskConstraint> = (0..3)
                .map(|_| {
                    let c = start + Vec2::from_polar(rng.gen_range(0.0..80.0), rng.gen_range(0.0..std::f64::consts::TAU));
                    DiskConstraint::new(c, start.dist(c) + rng.gen_range(1.0..60.0))
                })
                .collect();
            let t = start + Vec2::from_polar(rng.gen_range(0.0..400.0), rng.gen_range(0.0..std::f64::consts::TAU));
            let got = project_horizontal(t, &disks, start);
            assert!(disks.iter().all(|d| got.dist(d.center) <= d.radius + 1e-6));
            let oracle = grid_oracle(t, &disks).unwrap();
            assert!(got.dist(t) <= oracle.dist(t) + 1e-2, "{} vs {}", got.dist(t), oracle.dist(t));
            let again = project_horizontal(got, &disks, start);
            assert!(again.dist(got) < 1e-6);
        }
    }

    #[test]
    fn pull_back_keeps_tangent_case_feasible() {
        // externally tangent disks: the intersection is a single point
        let disks = [DiskConstraint::new(Vec2::ZERO, 1.0), DiskConstraint::new(Vec2::new(2.0, 0.0), 1.0)];
        let start = Vec2::new(1.0, 0.0);
        let got = project_horizontal(Vec2::new(1.0, 5.0), &disks, start);
        assert!(disks.iter().all(|d| d.contains(got)));
        assert!(got.dist(start) < 1e-2);
    }
}

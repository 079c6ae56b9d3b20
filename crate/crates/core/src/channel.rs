//! Air-to-ground pathloss models.
//!
//! The user-to-drone (U2D) link uses a free-space term plus an
//! elevation-dependent mix of LoS and NLoS excess losses. The drone-to-BS
//! (D2B) backhaul uses a log-distance term with an elevation-angle
//! correction. Every angle handled here is in degrees.
//!
//! The D2B model is not monotone in elevation, so the backhaul-feasible
//! sets are found by sampling followed by bisection of every sign change,
//! rather than by assuming a single crossing.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// D2B horizontal distances are clamped to this many meters before taking
/// the logarithm.
pub const D2B_R_MIN: f64 = 1.0;

/// Boundary refinement tolerance for feasible-set searches, in meters.
const BOUNDARY_TOL: f64 = 1e-4;

/// Minimum number of altitude samples used before refining boundaries.
const ALTITUDE_SAMPLES: usize = 1000;

/// U2D model constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct U2dParams {
    /// LoS-probability shape (dimensionless).
    pub a: f64,
    /// LoS-probability slope, per degree.
    pub b: f64,
    /// Excess loss under LoS, dB.
    pub eta_los: f64,
    /// Excess loss under NLoS, dB.
    pub eta_nlos: f64,
    /// Carrier frequency, Hz.
    pub fc: f64,
    /// Speed of light, m/s.
    pub c: f64,
}

impl U2dParams {
    /// Suburban environment at 2.4 GHz.
    pub fn suburban() -> Self {
        Self {
            a: 4.88,
            b: 0.43,
            eta_los: 0.1,
            eta_nlos: 21.0,
            fc: 2.4e9,
            c: SPEED_OF_LIGHT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.a > 0.0
            && self.b > 0.0
            && self.eta_los >= 0.0
            && self.eta_nlos >= self.eta_los
            && self.fc > 0.0
            && self.c > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidScenario(format!("bad U2D parameters {self:?}")))
        }
    }
}

impl Default for U2dParams {
    fn default() -> Self {
        Self::suburban()
    }
}

/// D2B model constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct D2bParams {
    /// Pathloss exponent.
    pub alpha: f64,
    /// Angle-term scale, dB per degree.
    pub angle_gain: f64,
    /// Angle offset, degrees.
    pub theta0: f64,
    /// Angle-term decay, degrees.
    pub angle_decay: f64,
    /// Constant offset, dB.
    pub eta0: f64,
    /// Backhaul carrier frequency in Hz. Informational only; the fitted
    /// model has no frequency term.
    pub fc: f64,
}

impl D2bParams {
    /// Suburban LTE backhaul at 850 MHz.
    pub fn suburban() -> Self {
        Self {
            alpha: 3.04,
            angle_gain: -23.29,
            theta0: -3.61,
            angle_decay: 4.14,
            eta0: 20.7,
            fc: 850e6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha > 0.0 && self.angle_decay > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidScenario(format!("bad D2B parameters {self:?}")))
        }
    }
}

impl Default for D2bParams {
    fn default() -> Self {
        Self::suburban()
    }
}

/// Search caps for the backhaul-feasible sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchLimits {
    /// Largest horizontal distance considered, m.
    pub r_max: f64,
    /// Altitude ceiling, m.
    pub h_cap: f64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            r_max: 5000.0,
            h_cap: 1000.0,
        }
    }
}

/// A pathloss value in decibels.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct PathlossDb(pub f64);

impl PathlossDb {
    pub fn db(self) -> f64 {
        self.0
    }
}

/// Closed interval `[lo, hi]` in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn distance_to(&self, v: f64) -> f64 {
        if v < self.lo {
            self.lo - v
        } else if v > self.hi {
            v - self.hi
        } else {
            0.0
        }
    }
}

/// The interval containing `v`, or failing that the nearest one.
pub fn interval_around(intervals: &[Interval], v: f64) -> Option<Interval> {
    intervals.iter().copied().min_by(|a, b| {
        a.distance_to(v)
            .partial_cmp(&b.distance_to(v))
            .unwrap_or(std::cmp::Ordering::Equal)
    })
}

/// Elevation angle in degrees; 90 directly overhead.
pub fn elevation_deg(r: f64, h: f64) -> f64 {
    h.atan2(r).to_degrees()
}

/// LoS probability as a function of the elevation angle.
pub fn los_probability_at_elevation(theta_deg: f64, p: &U2dParams) -> f64 {
    1.0 / (1.0 + p.a * (-p.b * (theta_deg - p.a)).exp())
}

/// LoS probability of a U2D link at horizontal distance `r` and altitude `h`.
pub fn los_probability(r: f64, h: f64, p: &U2dParams) -> Result<f64> {
    check_u2d_domain(r, h)?;
    Ok(los_probability_at_elevation(elevation_deg(r, h), p))
}

/// Free-space loss `20 log10(4 pi fc d / c)` at 3D distance `d`.
pub fn free_space_db(d: f64, p: &U2dParams) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * p.fc * d / p.c).log10()
}

/// Average U2D pathloss.
pub fn u2d_pathloss(r: f64, h: f64, p: &U2dParams) -> Result<PathlossDb> {
    check_u2d_domain(r, h)?;
    Ok(PathlossDb(u2d_db(r, h, p)))
}

/// Unchecked U2D pathloss in dB. Callers guarantee `r > 0 || h > 0`.
pub fn u2d_db(r: f64, h: f64, p: &U2dParams) -> f64 {
    debug_assert!(r > 0.0 || h > 0.0);
    let los = los_probability_at_elevation(elevation_deg(r, h), p);
    free_space_db(r.hypot(h), p) + p.eta_nlos + los * (p.eta_los - p.eta_nlos)
}

/// U2D pathloss and its first two derivatives with respect to altitude,
/// at fixed horizontal distance. Requires `h > 0`.
pub fn u2d_altitude_derivatives(r: f64, h: f64, p: &U2dParams) -> (f64, f64, f64) {
    let d2 = r * r + h * h;
    let k = 10.0 / std::f64::consts::LN_10;
    let fs1 = k * 2.0 * h / d2;
    let fs2 = k * 2.0 * (r * r - h * h) / (d2 * d2);

    let deg = 180.0 / std::f64::consts::PI;
    let th1 = deg * r / d2;
    let th2 = -deg * 2.0 * r * h / (d2 * d2);

    let los = los_probability_at_elevation(elevation_deg(r, h), p);
    let dp = p.b * los * (1.0 - los);
    let ddp = p.b * (1.0 - 2.0 * los) * dp;
    let delta = p.eta_los - p.eta_nlos;

    let value = free_space_db(d2.sqrt(), p) + p.eta_nlos + los * delta;
    let first = fs1 + delta * dp * th1;
    let second = fs2 + delta * (ddp * th1 * th1 + dp * th2);
    (value, first, second)
}

fn check_u2d_domain(r: f64, h: f64) -> Result<()> {
    if !(r >= 0.0 && h >= 0.0) || !r.is_finite() || !h.is_finite() {
        return Err(Error::Domain(format!("U2D geometry r={r}, h={h}")));
    }
    if r == 0.0 && h == 0.0 {
        return Err(Error::Domain("U2D distance is zero".into()));
    }
    Ok(())
}

/// D2B pathloss with the elevation angle given directly.
pub fn d2b_pathloss_at_elevation(r: f64, theta_deg: f64, p: &D2bParams) -> Result<PathlossDb> {
    if !(r >= D2B_R_MIN) || !r.is_finite() {
        return Err(Error::Domain(format!(
            "D2B horizontal distance {r} m below {D2B_R_MIN} m"
        )));
    }
    Ok(PathlossDb(d2b_db_at_elevation(r, theta_deg, p)))
}

fn d2b_db_at_elevation(r: f64, theta_deg: f64, p: &D2bParams) -> f64 {
    let x = theta_deg - p.theta0;
    10.0 * p.alpha * r.log10() + p.angle_gain * x * (-x / p.angle_decay).exp() + p.eta0
}

/// Average D2B pathloss at horizontal distance `r` from the BS and altitude `h`.
pub fn d2b_pathloss(r: f64, h: f64, p: &D2bParams) -> Result<PathlossDb> {
    if !(h >= 0.0) {
        return Err(Error::Domain(format!("negative altitude {h}")));
    }
    d2b_pathloss_at_elevation(r, elevation_deg(r, h), p)
}

/// D2B pathloss with the horizontal distance clamped to [`D2B_R_MIN`].
pub fn d2b_db_clamped(r: f64, h: f64, p: &D2bParams) -> f64 {
    let r = r.max(D2B_R_MIN);
    d2b_db_at_elevation(r, elevation_deg(r, h), p)
}

/// Radius of the BS-centred disk that is entirely backhaul-feasible at
/// altitude `h`: the largest `r` such that every distance in
/// `[D2B_R_MIN, r]` meets `l_db`. Capped at `limits.r_max`.
///
/// Fails with [`Error::InfeasibleAltitude`] when even `D2B_R_MIN` violates
/// the bound.
pub fn d2b_feasible_radius(h: f64, l_db: f64, p: &D2bParams, limits: &SearchLimits) -> Result<f64> {
    if l_db.is_nan() {
        return Err(Error::Domain("NaN pathloss bound".into()));
    }
    if l_db == f64::INFINITY {
        return Ok(limits.r_max);
    }
    let ok = |r: f64| d2b_db_clamped(r, h, p) <= l_db;
    if !ok(D2B_R_MIN) {
        return Err(Error::InfeasibleAltitude { h, l_db });
    }
    let mut prev = D2B_R_MIN;
    loop {
        let next = (prev + radial_step(prev)).min(limits.r_max);
        if !ok(next) {
            return Ok(refine_boundary(&ok, prev, next));
        }
        if next >= limits.r_max {
            return Ok(limits.r_max);
        }
        prev = next;
    }
}

/// All maximal radial intervals in `[D2B_R_MIN, r_max]` meeting the bound
/// at altitude `h`. The first interval, if it starts at `D2B_R_MIN`, is the
/// disk reported by [`d2b_feasible_radius`]; later ones are annuli.
pub fn d2b_radial_intervals(
    h: f64,
    l_db: f64,
    p: &D2bParams,
    limits: &SearchLimits,
) -> Vec<Interval> {
    if l_db == f64::INFINITY {
        return vec![Interval::new(D2B_R_MIN, limits.r_max)];
    }
    let mut grid = vec![D2B_R_MIN];
    let mut r = D2B_R_MIN;
    while r < limits.r_max {
        r = (r + radial_step(r)).min(limits.r_max);
        grid.push(r);
    }
    feasible_intervals(|r| d2b_db_clamped(r, h, p) <= l_db, &grid)
}

/// Altitudes in `[0, h_cap]` meeting the D2B bound at horizontal distance
/// `r`, as maximal intervals. Empty when the bound cannot be met.
pub fn d2b_feasible_altitude_interval(
    r: f64,
    l_db: f64,
    p: &D2bParams,
    limits: &SearchLimits,
) -> Result<Vec<Interval>> {
    if !(r >= D2B_R_MIN) {
        return Err(Error::Domain(format!(
            "D2B horizontal distance {r} m below {D2B_R_MIN} m"
        )));
    }
    if l_db.is_nan() {
        return Err(Error::Domain("NaN pathloss bound".into()));
    }
    if l_db == f64::INFINITY {
        return Ok(vec![Interval::new(0.0, limits.h_cap)]);
    }
    let n = ALTITUDE_SAMPLES;
    let grid: Vec<f64> = (0..=n)
        .map(|i| limits.h_cap * i as f64 / n as f64)
        .collect();
    Ok(feasible_intervals(
        |h| d2b_db_at_elevation(r, elevation_deg(r, h), p) <= l_db,
        &grid,
    ))
}

fn radial_step(r: f64) -> f64 {
    0.25 + 0.004 * r
}

/// Maximal intervals of `grid`'s span where `ok` holds, with every sign
/// change refined by bisection. Interval ends are feasible points.
fn feasible_intervals(ok: impl Fn(f64) -> bool, grid: &[f64]) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    let mut prev = (grid[0], ok(grid[0]));
    if prev.1 {
        start = Some(grid[0]);
    }
    for &x in &grid[1..] {
        let cur = ok(x);
        match (prev.1, cur) {
            (false, true) => start = Some(refine_boundary(&ok, x, prev.0)),
            (true, false) => {
                let end = refine_boundary(&ok, prev.0, x);
                out.push(Interval::new(start.take().unwrap_or(prev.0), end));
            }
            _ => {}
        }
        prev = (x, cur);
    }
    if let Some(s) = start {
        out.push(Interval::new(s, prev.0));
    }
    out
}

/// Bisect between a feasible `good` and an infeasible `bad` point; returns
/// a feasible point within [`BOUNDARY_TOL`] of the boundary.
fn refine_boundary(ok: &impl Fn(f64) -> bool, mut good: f64, mut bad: f64) -> f64 {
    while (bad - good).abs() > BOUNDARY_TOL {
        let mid = 0.5 * (good + bad);
        if ok(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{D2bParams, SearchLimits, U2dParams};
use crate::geom::Vec2;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// A BS-centred data-collection scenario. Speeds are per slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub schema_version: u32,
    /// BS coverage radius, m.
    pub r_bs: f64,
    /// User positions, m.
    pub users: Vec<Vec2>,
    pub num_dcs: usize,
    /// Slots per trajectory period.
    pub num_slots: usize,
    /// Minimum slots per user and period.
    pub s_min: usize,
    /// Maximum users per DC.
    pub n_u: usize,
    /// Maximum horizontal move per slot, m.
    pub v_max: f64,
    /// Maximum altitude change per slot, m.
    pub h_max_rate: f64,
    /// D2B pathloss bound, dB. `null` in JSON means unconstrained.
    #[serde(with = "inf_as_null")]
    pub l_db: f64,
    /// Trajectory-change threshold for convergence, m.
    pub epsilon: f64,
    /// Lowest allowed flight altitude, m.
    pub h_min: f64,
    /// Altitude of the initial static deployment, m.
    pub h_init: f64,
    pub limits: SearchLimits,
    pub u2d: U2dParams,
    pub d2b: D2bParams,
    pub seed: u64,
}

/// Optional replacements for the default scenario parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOverrides {
    pub r_bs: Option<f64>,
    pub num_slots: Option<usize>,
    pub s_min: Option<usize>,
    pub n_u: Option<usize>,
    pub v_max: Option<f64>,
    pub h_max_rate: Option<f64>,
    pub l_db: Option<f64>,
    pub epsilon: Option<f64>,
    pub h_min: Option<f64>,
    pub h_init: Option<f64>,
    pub h_cap: Option<f64>,
}

/// Draw `num_users` users uniformly over the coverage disk.
///
/// Defaults: r_bs 900 m, 50 slots, s_min 4, 90 m/slot horizontal and
/// 10 m/slot vertical speed, 80 dB D2B bound, epsilon 0.1 m, suburban
/// channels, 30 m altitude floor, 90 m initial altitude. `n_u` defaults to
/// `min(N / s_min, ceil(|U| / |D|) + 2)`.
pub fn generate_scenario(
    seed: u64,
    num_users: usize,
    num_dcs: usize,
    overrides: &ScenarioOverrides,
) -> Result<Scenario> {
    if num_users == 0 {
        return Err(Error::InvalidScenario("at least one user is required".into()));
    }
    if num_dcs == 0 {
        return Err(Error::InvalidScenario("at least one DC is required".into()));
    }
    let o = overrides;
    let r_bs = o.r_bs.unwrap_or(900.0);
    let num_slots = o.num_slots.unwrap_or(50);
    let s_min = o.s_min.unwrap_or(4);
    let n_u = o.n_u.unwrap_or_else(|| {
        let cap = num_slots.checked_div(s_min).unwrap_or(usize::MAX);
        cap.min(num_users.div_ceil(num_dcs) + 2)
    });
    let mut limits = SearchLimits::default();
    if let Some(h_cap) = o.h_cap {
        limits.h_cap = h_cap;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users = (0..num_users)
        .map(|_| {
            let rad = r_bs * rng.gen::<f64>().sqrt();
            let ang = std::f64::consts::TAU * rng.gen::<f64>();
            Vec2::from_polar(rad, ang)
        })
        .collect();

    let s = Scenario {
        schema_version: SCHEMA_VERSION,
        r_bs,
        users,
        num_dcs,
        num_slots,
        s_min,
        n_u,
        v_max: o.v_max.unwrap_or(90.0),
        h_max_rate: o.h_max_rate.unwrap_or(10.0),
        l_db: o.l_db.unwrap_or(80.0),
        epsilon: o.epsilon.unwrap_or(0.1),
        h_min: o.h_min.unwrap_or(30.0),
        h_init: o.h_init.unwrap_or(90.0),
        limits,
        u2d: U2dParams::suburban(),
        d2b: D2bParams::suburban(),
        seed,
    };
    s.validate()?;
    Ok(s)
}

impl Scenario {
    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScenario(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        let (u, d, n) = (self.num_users(), self.num_dcs, self.num_slots);
        if u == 0 || d == 0 || n == 0 {
            return bad(format!("need users, DCs and slots (got {u}, {d}, {n})"));
        }
        if self.s_min == 0 {
            return bad("s_min must be at least 1".into());
        }
        if !(self.r_bs > 0.0) {
            return bad(format!("r_bs must be positive, got {}", self.r_bs));
        }
        for (i, p) in self.users.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite()) || p.norm() > self.r_bs * (1.0 + 1e-12) {
                return bad(format!("user {i} at ({}, {}) is outside the coverage disk", p.x, p.y));
            }
        }
        if self.n_u * d < u {
            return bad(format!("n_u * |D| = {} < |U| = {u}", self.n_u * d));
        }
        if self.s_min * self.n_u > n {
            return bad(format!("s_min * n_u = {} exceeds N = {n}", self.s_min * self.n_u));
        }
        if n * d < u * self.s_min {
            return bad(format!("N = {n} slots cannot give {u} users {} slots each on {d} DCs", self.s_min));
        }
        if !(self.v_max > 0.0 && self.h_max_rate > 0.0) {
            return bad("speed limits must be positive".into());
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive".into());
        }
        if self.l_db.is_nan() {
            return bad("l_db is NaN".into());
        }
        if !(self.h_min > 0.0 && self.h_min <= self.h_init && self.h_init <= self.limits.h_cap) {
            return bad(format!(
                "need 0 < h_min <= h_init <= h_cap (got {}, {}, {})",
                self.h_min, self.h_init, self.limits.h_cap
            ));
        }
        self.u2d.validate()?;
        self.d2b.validate()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }
}

mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

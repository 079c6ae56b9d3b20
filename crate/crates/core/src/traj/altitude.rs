use crate::channel::{u2d_altitude_derivatives, u2d_db, U2dParams};
use crate::{Error, Result};

/// Newton iterations stop once a step is at most this, m.
pub const ALTITUDE_TOL: f64 = 1e-3;
const MAX_STEPS: usize = 200;
const GOLDEN: f64 = 0.381_966_011_250_105;
pub const UNIMODALITY_SAMPLES: usize = 512;

/// Admissible altitudes `[lo, hi]` for one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AltitudeWindow {
    pub lo: f64,
    pub hi: f64,
}

impl AltitudeWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0 && lo <= hi) {
            return Err(Error::EmptyWindow { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, h: f64) -> bool {
        h >= self.lo && h <= self.hi
    }
}

/// Altitude in `window` minimizing the U2D pathloss at horizontal
/// distance `r`.
///
/// Newton's method on the stationarity condition `L'(h) = 0`, kept inside
/// a sign bracket of `L'`. A step that leaves the bracket, or a point with
/// non-positive curvature, falls back to a golden-section step.
pub fn optimize_altitude(r: f64, window: AltitudeWindow, p: &U2dParams) -> f64 {
    let (lo, hi) = (window.lo, window.hi);
    if hi - lo <= ALTITUDE_TOL * 1e-3 {
        return lo;
    }
    // keep away from the r = h = 0 singularity
    let eval_lo = if r == 0.0 { lo.max(1e-9) } else { lo };
    let slope = |h: f64| u2d_altitude_derivatives(r, h, p).1;
    if slope(eval_lo) >= 0.0 {
        return lo;
    }
    if slope(hi) <= 0.0 {
        return hi;
    }
    let (mut a, mut b) = (eval_lo, hi);
    let mut x = 0.5 * (a + b);
    for _ in 0..MAX_STEPS {
        let (_, d1, d2) = u2d_altitude_derivatives(r, x, p);
        if d1 < 0.0 {
            a = x;
        } else if d1 > 0.0 {
            b = x;
        } else {
            break;
        }
        let newton = x - d1 / d2;
        let next = if d2 > 0.0 && newton > a && newton < b {
            newton
        } else {
            let far = if b - x > x - a { b } else { a };
            x + GOLDEN * (far - x)
        };
        let step = (next - x).abs();
        x = next;
        if step <= ALTITUDE_TOL {
            break;
        }
    }
    [x, lo, hi]
        .into_iter()
        .map(|h| (h, u2d_db(r, h.max(if r == 0.0 { 1e-9 } else { 0.0 }), p)))
        .min_by(|u, v| u.1.total_cmp(&v.1))
        .map_or(x, |(h, _)| h)
}

/// Samples the pathloss at [`UNIMODALITY_SAMPLES`] altitudes across the
/// window and reports whether it turns from descending to ascending more
/// than once.
pub fn is_unimodal(r: f64, window: AltitudeWindow, p: &U2dParams) -> bool {
    let n = UNIMODALITY_SAMPLES;
    let lo = if r == 0.0 { window.lo.max(1e-6) } else { window.lo };
    let values: Vec<f64> = (0..n)
        .map(|i| u2d_db(r, lo + (window.hi - lo) * i as f64 / (n - 1) as f64, p))
        .collect();
    let mut turns = 0;
    let mut descending = true;
    for w in values.windows(2) {
        let diff = w[1] - w[0];
        if descending && diff > 1e-9 {
            descending = false;
            turns += 1;
        } else if !descending && diff < -1e-9 {
            descending = true;
        }
    }
    turns <= 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn golden_oracle(r: f64, lo: f64, hi: f64, p: &U2dParams) -> f64 {
        let f = |h: f64| u2d_db(r, h.max(1e-9), p);
        let (mut a, mut b) = (lo, hi);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        while b - a > 1e-7 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn degenerate_window() {
        let p = U2dParams::suburban();
        let w = AltitudeWindow::new(55.0, 55.0).unwrap();
        assert_eq!(optimize_altitude(300.0, w, &p), 55.0);
    }

    #[test]
    fn empty_window_is_rejected() {
        assert!(matches!(AltitudeWindow::new(60.0, 50.0), Err(Error::EmptyWindow { .. })));
    }

    #[test]
    fn matches_golden_section_at_200m() {
        let p = U2dParams::suburban();
        let w = AltitudeWindow::new(0.0, 1000.0).unwrap();
        let got = optimize_altitude(200.0, w, &p);
        let want = golden_oracle(200.0, 0.0, 1000.0, &p);
        assert!((got - want).abs() < 1e-2, "{got} vs {want}");
    }

    #[test]
    fn window_above_optimum_returns_lower_end() {
        let p = U2dParams::suburban();
        let free = optimize_altitude(200.0, AltitudeWindow::new(0.0, 1000.0).unwrap(), &p);
        let w = AltitudeWindow::new(free + 50.0, free + 300.0).unwrap();
        assert_eq!(optimize_altitude(200.0, w, &p), free + 50.0);
        let w = AltitudeWindow::new(1.0, free - 20.0).unwrap();
        assert_eq!(optimize_altitude(200.0, w, &p), free - 20.0);
    }

    #[test]
    fn overhead_optimum_is_the_floor() {
        let p = U2dParams::suburban();
        let w = AltitudeWindow::new(30.0, 500.0).unwrap();
        assert_eq!(optimize_altitude(0.0, w, &p), 30.0);
    }

    #[test]
    fn random_windows_match_oracle_and_are_locally_optimal() {
        let p = U2dParams::suburban();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let r = rng.gen_range(0.0..900.0);
            let lo = rng.gen_range(1.0..400.0);
            let hi = lo + rng.gen_range(0.0..600.0);
            let w = AltitudeWindow::new(lo, hi).unwrap();
            let got = optimize_altitude(r, w, &p);
            let want = golden_oracle(r, lo, hi, &p);
            assert!((got - want).abs() < 1e-2, "r={r} [{lo}, {hi}]: {got} vs {want}");
            assert!(w.contains(got));
            let here = u2d_db(r, got, &p);
            for h in [got - 1e-2, got + 1e-2] {
                if w.contains(h) {
                    assert!(u2d_db(r, h, &p) >= here - 1e-6);
                }
            }
            assert!(is_unimodal(r, w, &p));
        }
    }

    #[test]
    fn optimum_elevation_is_about_twenty_degrees() {
        let p = U2dParams::suburban();
        let h = optimize_altitude(500.0, AltitudeWindow::new(0.0, 1000.0).unwrap(), &p);
        let theta = h.atan2(500.0).to_degrees();
        assert!((15.0..25.0).contains(&theta), "{theta}");
    }
}

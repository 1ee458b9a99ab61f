use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::driving::DrivingPath;
use super::slit::{slit_step_factor, upper_sqrt};
use crate::green::HPoint;
use crate::params::SleParams;

/// A point counts as swallowed once `Im Z_t ≤ SWALLOW_REL_THRESHOLD·|z|`.
pub const SWALLOW_REL_THRESHOLD: f64 = 1e-9;

/// Loewner state of a single interior point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackedPoint {
    pub origin: HPoint,
    /// `Z_t(z) = g_t(z) − U_t`.
    pub z_t: Complex64,
    /// `|g_t'(z)|`.
    pub abs_deriv: f64,
    /// `Υ_t(z) = Im g_t(z) / |g_t'(z)|`.
    pub upsilon: f64,
    /// `S_t(z) = sin arg Z_t(z)`.
    pub s_t: f64,
    pub swallowed: bool,
    pub swallow_time: Option<f64>,
    /// Number of steps applied so far.
    pub steps: usize,
    /// Step at which `Υ` first reached the stopping level, if it did.
    pub stop_index: Option<usize>,
    swallow_level: f64,
}

/// One row of a recorded trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub time: f64,
    pub z_t: Complex64,
    pub abs_deriv: f64,
    pub upsilon: f64,
    pub s_t: f64,
}

impl TrackedPoint {
    pub fn new(origin: HPoint) -> Self {
        let z = origin.to_complex();
        Self {
            origin,
            z_t: z,
            abs_deriv: 1.0,
            upsilon: origin.im,
            s_t: origin.im / z.norm(),
            swallowed: false,
            swallow_time: None,
            steps: 0,
            stop_index: None,
            swallow_level: SWALLOW_REL_THRESHOLD * z.norm(),
        }
    }

    pub fn alive(&self) -> bool {
        !self.swallowed
    }

    /// Applies one step: shift by the driving increment `du`, then the slit
    /// map of capacity `cap = 2aδ`. `time` is the grid time after the step.
    /// Swallowed points are frozen.
    #[inline]
    pub fn advance(&mut self, du: f64, cap: f64, time: f64) {
        if self.swallowed {
            return;
        }
        let w = Complex64::new(self.z_t.re - du, self.z_t.im);
        let radicand = w * w + cap;
        let next = upper_sqrt(radicand, w.re);
        self.steps += 1;
        if next.im <= self.swallow_level || (radicand.im == 0.0 && radicand.re >= 0.0) {
            self.swallowed = true;
            self.swallow_time = Some(time);
            self.z_t = next;
            return;
        }
        self.abs_deriv *= slit_step_factor(w, next);
        self.z_t = next;
        self.upsilon = next.im / self.abs_deriv;
        self.s_t = next.im / next.norm();
    }

    pub fn sample(&self, time: f64) -> TrajectorySample {
        TrajectorySample {
            time,
            z_t: self.z_t,
            abs_deriv: self.abs_deriv,
            upsilon: self.upsilon,
            s_t: self.s_t,
        }
    }

    /// `M_t = |g_t'|^{2−d} G(Z_t) = Υ_t^{d−2} S_t^{4a−1}`.
    pub fn martingale_value(&self, p: &SleParams) -> f64 {
        self.upsilon.powf(p.d - 2.0) * self.s_t.powf(p.boundary_exponent())
    }
}

/// Runs the point `z` along the whole driving path, stopping early when
/// `Υ ≤ stop_upsilon` or when the point is swallowed. With `record` set, the
/// state after every applied step (and the initial state) is returned.
pub fn evolve_tracked_point(
    z: HPoint,
    driving: &DrivingPath,
    p: &SleParams,
    stop_upsilon: Option<f64>,
    record: bool,
) -> (TrackedPoint, Option<Vec<TrajectorySample>>) {
    let cap = 2.0 * p.a * driving.dt;
    let mut point = TrackedPoint::new(z);
    let mut trajectory = record.then(|| {
        let mut v = Vec::with_capacity(driving.n_steps() + 1);
        v.push(point.sample(0.0));
        v
    });
    if let Some(level) = stop_upsilon {
        if point.upsilon <= level {
            point.stop_index = Some(0);
            return (point, trajectory);
        }
    }
    for (k, &du) in driving.increments.iter().enumerate() {
        let time = driving.time(k + 1);
        point.advance(du, cap, time);
        if point.swallowed {
            break;
        }
        if let Some(t) = trajectory.as_mut() {
            t.push(point.sample(time));
        }
        if let Some(level) = stop_upsilon {
            if point.upsilon <= level {
                point.stop_index = Some(k + 1);
                break;
            }
        }
    }
    (point, trajectory)
}

#[cfg(test)]
mod tests {
    use super::super::driving::sample_driving;
    use super::super::slit::solve_constant_driving;
    use super::*;

    fn p83() -> SleParams {
        SleParams::from_kappa(8.0 / 3.0).unwrap()
    }

    #[test]
    fn zero_driving_matches_closed_form() {
        let mut p = p83();
        p.a = 1.0;
        let driving = DrivingPath::zero(1e-3, 500);
        let z = HPoint::new(0.0, 2.0).unwrap();
        let (state, traj) = evolve_tracked_point(z, &driving, &p, None, true);
        assert!((state.z_t - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-12);
        for s in traj.unwrap() {
            let exact = solve_constant_driving(z.to_complex(), 1.0, s.time);
            assert!((s.z_t - exact).norm() < 1e-12);
        }
    }

    #[test]
    fn upsilon_never_increases() {
        let p = p83();
        for idx in 0..5 {
            let driving = sample_driving(1e-3, 3000, 99, idx).unwrap();
            for z in [(0.0, 1.0), (0.5, 0.2), (-2.0, 3.0)] {
                let z = HPoint::new(z.0, z.1).unwrap();
                let (_, traj) = evolve_tracked_point(z, &driving, &p, None, true);
                let traj = traj.unwrap();
                for pair in traj.windows(2) {
                    assert!(pair[1].upsilon <= pair[0].upsilon * (1.0 + 1e-12));
                    assert!(pair[1].z_t.im < pair[0].z_t.im);
                }
                for s in &traj {
                    assert!((s.upsilon - s.z_t.im / s.abs_deriv).abs() <= 1e-12 * s.upsilon);
                    assert!((s.s_t - s.z_t.im / s.z_t.norm()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn stops_at_upsilon_level() {
        let p = p83();
        let driving = sample_driving(1e-3, 4000, 5, 1).unwrap();
        let z = HPoint::new(0.0, 0.3).unwrap();
        let (full, _) = evolve_tracked_point(z, &driving, &p, None, false);
        let level = 0.5 * (full.upsilon + 0.3);
        let (stopped, _) = evolve_tracked_point(z, &driving, &p, Some(level), false);
        let k = stopped.stop_index.expect("level above terminal value must be reached");
        assert!(stopped.upsilon <= level);
        assert_eq!(stopped.steps, k);
        let (before, _) = evolve_tracked_point(z, &driving.truncated(k - 1), &p, None, false);
        assert!(before.upsilon > level);
    }

    #[test]
    fn slit_hits_point_directly_above() {
        // a vertical slit of height √(2aδ) reaches i·√(2aδ)/2
        let mut p = p83();
        p.a = 1.0;
        let driving = DrivingPath::zero(0.5, 1);
        let (state, _) = evolve_tracked_point(HPoint::new(0.0, 0.5).unwrap(), &driving, &p, None, false);
        assert!(state.swallowed);
        assert_eq!(state.swallow_time, Some(0.5));
    }
}

use std::ops::ControlFlow;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::driving::DrivingPath;
use super::slit::{inverse_slit_step, upper_sqrt};
use crate::error::{domain, Result};
use crate::green::HPoint;
use crate::params::SleParams;

/// Sampled curve `γ(t_k)` on the driving grid, starting from `γ(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTrace {
    pub times: Vec<f64>,
    pub points: Vec<Complex64>,
    /// Largest distance between consecutive samples.
    pub mesh: f64,
}

impl CurveTrace {
    pub fn from_points(times: Vec<f64>, points: Vec<Complex64>) -> Self {
        let mesh = points
            .windows(2)
            .fold(0.0f64, |m, w| m.max((w[1] - w[0]).norm()));
        Self { times, points, mesh }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Mirror image across the imaginary axis.
    pub fn reflected(&self) -> Self {
        Self {
            times: self.times.clone(),
            points: self.points.iter().map(|z| -z.conj()).collect(),
            mesh: self.mesh,
        }
    }
}

/// Tip `γ(t_k) = g_{t_k}^{-1}(U_{t_k})`, obtained by pulling the recentred tip
/// `0` back through the inverse steps `k, k−1, …, 1`.
pub fn tip_at(driving: &DrivingPath, p: &SleParams, k: usize) -> Complex64 {
    let cap = 2.0 * p.a * driving.dt;
    let mut w = Complex64::new(0.0, 0.0);
    for &du in driving.increments[..k].iter().rev() {
        w = inverse_slit_step(w, cap);
        w.re += du;
    }
    w
}

const LANES: usize = 8;

/// Tips `γ(t_k)` for `k ∈ [first, first + count)`, bit-identical to
/// [`tip_at`]. Independent pull-backs are interleaved so that the dependent
/// square-root chains overlap in the pipeline.
pub fn tips_range(driving: &DrivingPath, p: &SleParams, first: usize, count: usize) -> Vec<Complex64> {
    let cap = 2.0 * p.a * driving.dt;
    let inc = &driving.increments;
    let mut out = Vec::with_capacity(count);
    let mut start = first;
    let end = first + count;
    while start + LANES <= end {
        let mut w = [Complex64::new(0.0, 0.0); LANES];
        // Lane `i` pulls back the tip at `start + i`: it alone applies the
        // steps past `start + lead` for `lead < i`, then all lanes share the
        // steps `start, …, 1`.
        for lead in (1..LANES).rev() {
            let du = inc[start + lead - 1];
            for wi in &mut w[lead..] {
                *wi = inverse_slit_step(*wi, cap);
                wi.re += du;
            }
        }
        for &du in inc[..start].iter().rev() {
            for wi in &mut w {
                *wi = inverse_slit_step(*wi, cap);
                wi.re += du;
            }
        }
        out.extend_from_slice(&w);
        start += LANES;
    }
    out.extend((start..end).map(|k| tip_at(driving, p, k)));
    out
}

const WALK_BLOCK: usize = 64;

/// Visits the tips `γ(t_k)` for `k = from, …, n` in order until `visit`
/// breaks. Tips are reconstructed in blocks, so a few tips past the break
/// may be computed and discarded.
pub fn walk_tips(
    driving: &DrivingPath,
    p: &SleParams,
    from: usize,
    mut visit: impl FnMut(usize, Complex64) -> ControlFlow<()>,
) {
    let end = driving.n_steps() + 1;
    let mut k = from;
    while k < end {
        let count = WALK_BLOCK.min(end - k);
        for (i, tip) in tips_range(driving, p, k, count).into_iter().enumerate() {
            if visit(k + i, tip).is_break() {
                return;
            }
        }
        k += count;
    }
}

/// Tips at every grid time. Quadratic in the number of steps.
pub fn trace_curve(driving: &DrivingPath, p: &SleParams) -> CurveTrace {
    let n = driving.n_steps();
    let times: Vec<f64> = (0..=n).map(|k| driving.time(k)).collect();
    let points = tips_range(driving, p, 0, n + 1);
    CurveTrace::from_points(times, points)
}

/// `min_k |z − γ(t_k)|`. Overestimates the distance to the continuous curve
/// by at most the trace mesh.
pub fn distance_to_curve(z: HPoint, trace: &CurveTrace) -> Result<f64> {
    if trace.is_empty() {
        return domain("distance to an empty trace");
    }
    let z = z.to_complex();
    Ok(trace
        .points
        .iter()
        .fold(f64::INFINITY, |m, p| m.min((z - p).norm())))
}

/// Forward image `g_T(z)` at the end of the driving path, for any `z` off the
/// curve (the far-field check uses points of large modulus).
pub fn forward_map(z: Complex64, driving: &DrivingPath, p: &SleParams) -> Complex64 {
    let cap = 2.0 * p.a * driving.dt;
    let mut w = z;
    for &du in &driving.increments {
        let shifted = Complex64::new(w.re - du, w.im);
        w = upper_sqrt(shifted * shifted + cap, shifted.re);
    }
    w + driving.cumulative[driving.n_steps()]
}

/// `|g_T(z) − z − aT/z|·|z|²`, the scaled remainder of the hydrodynamic
/// expansion at the end of the run.
pub fn farfield_check(driving: &DrivingPath, p: &SleParams, z_large: Complex64) -> f64 {
    let t = driving.horizon();
    let g = forward_map(z_large, driving, p);
    (g - z_large - p.a * t / z_large).norm() * z_large.norm_sqr()
}

//! Events read off tracked points: conformal-radius closeness and the
//! stopped martingale.

use serde::{Deserialize, Serialize};

use super::{by, map_paths, Estimate, RunConfig};
use crate::error::{domain, Result, SleError};
use crate::green::{green_one_point, ordered_separation, sin_arg, HPoint};
use crate::loewner::{evolve_tracked_point, TrackedPoint};

/// Joint and marginal closeness probabilities of two points on shared paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPointResult {
    pub joint: Estimate,
    pub marginal_z: Estimate,
    pub marginal_w: Estimate,
    /// `joint / (marginal_z · marginal_w)`, when both marginals are nonzero.
    pub ratio: Option<f64>,
    /// Two-point envelope divided by `G(z) G(w)`, i.e.
    /// `q^{d−2} [S(w) ∨ q]^{−β}`, the shape the ratio should follow.
    pub envelope: f64,
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        domain(format!("eps must be positive, got {eps}"))
    }
}

/// `P{Υ(z) ≤ eps before swallowing, within the horizon}`. For `eps ≥ Im z`
/// the event is certain and no paths are run.
pub fn estimate_one_point(z: HPoint, eps: f64, cfg: &RunConfig) -> Result<Estimate> {
    check_eps(eps)?;
    let n = cfg.n_paths;
    if eps >= z.im {
        return Estimate::checked_proportion(n, n, n);
    }
    let (end, half) = cfg.horizon_indices();
    let hits = map_paths(n, |i| {
        let driving = cfg.driving(i)?;
        Ok(evolve_tracked_point(z, &driving, &cfg.params, Some(eps), false).0.stop_index)
    })?;
    let count = |limit| hits.iter().filter(|&&k| by(k, limit)).count();
    Estimate::checked_proportion(count(end), count(half), n)
}

/// Steps both points along one path until both have reached their levels.
fn two_point_passages(
    z: HPoint,
    w: HPoint,
    eps_z: f64,
    eps_w: f64,
    driving: &crate::loewner::DrivingPath,
    cap: f64,
) -> (Option<usize>, Option<usize>) {
    let mut points = [TrackedPoint::new(z), TrackedPoint::new(w)];
    let levels = [eps_z, eps_w];
    let mut first: [Option<usize>; 2] = [None, None];
    for (j, p) in points.iter().enumerate() {
        if p.upsilon <= levels[j] {
            first[j] = Some(0);
        }
    }
    for (k, &du) in driving.increments.iter().enumerate() {
        let mut pending = false;
        for j in 0..2 {
            if first[j].is_some() || points[j].swallowed {
                continue;
            }
            points[j].advance(du, cap, driving.time(k + 1));
            if !points[j].swallowed && points[j].upsilon <= levels[j] {
                first[j] = Some(k + 1);
            }
            pending |= first[j].is_none() && !points[j].swallowed;
        }
        if !pending {
            break;
        }
    }
    (first[0], first[1])
}

/// Joint and marginal conformal-radius closeness of `z` and `w`, all three
/// counted on the same paths.
pub fn estimate_two_point(
    z: HPoint,
    w: HPoint,
    eps_z: f64,
    eps_w: f64,
    cfg: &RunConfig,
) -> Result<TwoPointResult> {
    if z == w {
        return Err(SleError::Degenerate("two-point estimate needs z ≠ w".into()));
    }
    check_eps(eps_z)?;
    check_eps(eps_w)?;
    let p = &cfg.params;
    let cap = 2.0 * p.a * cfg.effective_dt();
    let (end, half) = cfg.horizon_indices();
    let outcomes = map_paths(cfg.n_paths, |i| {
        let driving = cfg.driving(i)?;
        Ok(two_point_passages(z, w, eps_z, eps_w, &driving, cap))
    })?;
    let n = cfg.n_paths;
    let tally = |f: &dyn Fn(&(Option<usize>, Option<usize>), usize) -> bool| -> Result<Estimate> {
        let at = |limit| outcomes.iter().filter(|o| f(o, limit)).count();
        Estimate::checked_proportion(at(end), at(half), n)
    };
    let joint = tally(&|o, l| by(o.0, l) && by(o.1, l))?;
    let marginal_z = tally(&|o, l| by(o.0, l))?;
    let marginal_w = tally(&|o, l| by(o.1, l))?;
    let product = marginal_z.mean * marginal_w.mean;
    let ratio = (product > 0.0).then(|| joint.mean / product);
    let (q, _, far) = ordered_separation(z, w);
    let envelope = q.powf(p.d - 2.0) * sin_arg(far).max(q).powf(-p.beta);
    Ok(TwoPointResult {
        joint,
        marginal_z,
        marginal_w,
        ratio,
        envelope,
    })
}

/// Mean of `M_{t∧τ}(z) = |g_t'(z)|^{2−d} G(Z_t(z))` stopped at `t_stop`, at
/// the first step with `Υ ≤ eps_floor`, or just before swallowing.
pub fn estimate_martingale(z: HPoint, t_stop: f64, eps_floor: f64, cfg: &RunConfig) -> Result<Estimate> {
    check_eps(eps_floor)?;
    if !(t_stop >= 0.0 && t_stop.is_finite()) {
        return domain(format!("t_stop must be nonnegative, got {t_stop}"));
    }
    let p = &cfg.params;
    let steps = (t_stop / cfg.dt).round() as usize;
    if steps == 0 {
        return Estimate::sample_mean(&vec![green_one_point(z, p); cfg.n_paths]);
    }
    let values = map_paths(cfg.n_paths, |i| {
        let driving = cfg.driving_for(i, steps)?;
        Ok(evolve_tracked_point(z, &driving, p, Some(eps_floor), false).0.martingale_value(p))
    })?;
    Estimate::sample_mean(&values)
}

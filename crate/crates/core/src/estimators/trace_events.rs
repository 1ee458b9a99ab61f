//! Events read off the reconstructed curve: boundary hits, the Φ tail and
//! ordered first passages.
//!
//! Tips cost `O(k)` each, so every walk starts as late as the Koebe lower
//! bound `dist(z, γ[0,t]) ≥ Υ_t(z)/2` allows and stops as soon as the outcome
//! is settled.

use std::cmp::Ordering;
use std::ops::ControlFlow;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{by, map_paths, Estimate, RunConfig};
use crate::error::{domain, Result, SleError};
use crate::green::{phi_distance_threshold, HPoint};
use crate::loewner::{evolve_tracked_point, walk_tips, DrivingPath};
use crate::params::SleParams;

/// Smallest `S_σ(1+iy)` counted by the conditional boundary event.
pub const CONDITIONAL_S_LEVEL: f64 = 0.1;

/// Boundary-hit estimates for one `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryHit {
    pub y: f64,
    /// `P{σ ≤ T}`.
    pub unconditional: Estimate,
    /// `P{σ ≤ T, S_σ(1+iy) ≥ 1/10}`.
    pub conditional: Estimate,
    /// Mean and maximum of the mesh correction over the hitting steps; the
    /// hit radius exceeds `2y` by this much, so the bias is an over-count.
    pub mean_mesh_at_hit: Option<f64>,
    pub max_mesh_at_hit: Option<f64>,
}

/// Radius of the trace hit test: `2y` plus half the larger grid spacing
/// adjacent to the tested tip.
pub fn boundary_hit_radius(y: f64, half_spacing: f64) -> f64 {
    2.0 * y + half_spacing
}

#[derive(Debug, Clone, Copy)]
struct Hit {
    index: usize,
    half_spacing: f64,
    s_at_hit: f64,
}

/// `S_t(1+iy)` after each step; frozen at its last value once swallowed.
fn s_trajectory(y: f64, driving: &DrivingPath, p: &SleParams) -> Vec<f64> {
    let origin = HPoint { re: 1.0, im: y };
    let (_, samples) = evolve_tracked_point(origin, driving, p, None, true);
    samples.unwrap_or_default().into_iter().map(|s| s.s_t).collect()
}

fn boundary_passages(ys: &[f64], driving: &DrivingPath, p: &SleParams) -> Vec<Option<Hit>> {
    let target = Complex64::new(1.0, 0.0);
    let s_paths: Vec<Vec<f64>> = ys.iter().map(|&y| s_trajectory(y, driving, p)).collect();
    let mut hits: Vec<Option<Hit>> = vec![None; ys.len()];
    let mut pending = ys.len();
    // Tip `k` is tested once tip `k + 1` is known; the last tip only has a
    // left neighbour.
    let mut test = |k: usize, tip: Complex64, half_spacing: f64, hits: &mut Vec<Option<Hit>>| {
        let dist = (tip - target).norm();
        for (j, &y) in ys.iter().enumerate() {
            if hits[j].is_none() && dist <= boundary_hit_radius(y, half_spacing) {
                let s = &s_paths[j];
                hits[j] = Some(Hit {
                    index: k,
                    half_spacing,
                    s_at_hit: s[k.min(s.len() - 1)],
                });
                pending -= 1;
            }
        }
        pending == 0
    };
    let mut prev: Option<(usize, Complex64, f64)> = None;
    let mut done = false;
    walk_tips(driving, p, 0, |k, tip| {
        if let Some((kp, tp, left)) = prev {
            let right = (tip - tp).norm();
            if test(kp, tp, 0.5 * left.max(right), &mut hits) {
                done = true;
                return ControlFlow::Break(());
            }
            prev = Some((k, tip, right));
        } else {
            prev = Some((k, tip, 0.0));
        }
        ControlFlow::Continue(())
    });
    if !done {
        if let Some((kp, tp, left)) = prev {
            test(kp, tp, 0.5 * left, &mut hits);
        }
    }
    hits
}

/// Boundary-hit estimates for every `y`, all counted on the same traces.
pub fn estimate_boundary_hits(ys: &[f64], cfg: &RunConfig) -> Result<Vec<BoundaryHit>> {
    if ys.is_empty() {
        return domain("boundary hit needs at least one y");
    }
    if let Some(&y) = ys.iter().find(|&&y| !(y > 0.0 && y <= 0.25)) {
        return domain(format!("boundary hit needs 0 < y ≤ 1/4, got {y}"));
    }
    let p = &cfg.params;
    let outcomes = map_paths(cfg.n_paths, |i| Ok(boundary_passages(ys, &cfg.driving(i)?, p)))?;
    let (end, half) = cfg.horizon_indices();
    let n = cfg.n_paths;
    (0..ys.len())
        .map(|j| {
            let hits: Vec<Hit> = outcomes.iter().filter_map(|o| o[j]).collect();
            let count = |limit: usize, conditional: bool| {
                hits.iter()
                    .filter(|h| h.index <= limit && (!conditional || h.s_at_hit >= CONDITIONAL_S_LEVEL))
                    .count()
            };
            let meshes = hits.iter().map(|h| h.half_spacing);
            Ok(BoundaryHit {
                y: ys[j],
                unconditional: Estimate::checked_proportion(count(end, false), count(half, false), n)?,
                conditional: Estimate::checked_proportion(count(end, true), count(half, true), n)?,
                mean_mesh_at_hit: (!hits.is_empty()).then(|| meshes.clone().sum::<f64>() / hits.len() as f64),
                max_mesh_at_hit: meshes.reduce(f64::max),
            })
        })
        .collect()
}

/// `(P{σ ≤ T}, P{σ ≤ T, S_σ(1+iy) ≥ 1/10})` for a single `y`.
pub fn estimate_boundary_hit(y: f64, cfg: &RunConfig) -> Result<(Estimate, Estimate)> {
    let hit = estimate_boundary_hits(&[y], cfg)?.remove(0);
    Ok((hit.unconditional, hit.conditional))
}

/// Distance below which `Φ(z) ≤ eps · Φ₀(z)`, with `Φ₀(z) = |z|^{4a−1}`.
pub fn phi_tail_threshold(z: HPoint, eps: f64, p: &SleParams) -> f64 {
    let phi0 = z.norm().powf(p.boundary_exponent());
    phi_distance_threshold(eps * phi0, z.im, p)
}

/// First step at which the Koebe bound no longer keeps the curve farther
/// than `radius` from `z`, or `None` if it never does.
fn screen_start(z: HPoint, radius: f64, driving: &DrivingPath, p: &SleParams) -> Option<usize> {
    let (point, _) = evolve_tracked_point(z, driving, p, Some(2.0 * radius), false);
    point.stop_index.or(point.swallowed.then_some(point.steps))
}

/// Minimal tip distance to `z` up to the half horizon and the full horizon,
/// exact whenever it is at most `radius`.
fn min_distances(
    z: HPoint,
    radius: f64,
    stop_below: f64,
    half: usize,
    driving: &DrivingPath,
    p: &SleParams,
) -> (f64, f64) {
    let (mut to_half, mut to_end) = (f64::INFINITY, f64::INFINITY);
    if let Some(start) = screen_start(z, radius, driving, p) {
        let zc = z.to_complex();
        walk_tips(driving, p, start, |k, tip| {
            to_end = to_end.min((tip - zc).norm());
            if k <= half {
                to_half = to_end;
            }
            if to_end <= stop_below {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
    }
    (to_half, to_end)
}

/// `P{Φ_T(z) ≤ eps · Φ₀(z)}` for every `eps`, with `Φ_T` computed from the
/// distance to the traced curve.
pub fn estimate_phi_tail(z: HPoint, eps_grid: &[f64], cfg: &RunConfig) -> Result<Vec<Estimate>> {
    if eps_grid.is_empty() {
        return domain("phi tail needs at least one eps");
    }
    if let Some(&e) = eps_grid.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
        return domain(format!("phi tail needs eps in (0, 1], got {e}"));
    }
    let p = &cfg.params;
    let radii: Vec<f64> = eps_grid.iter().map(|&e| phi_tail_threshold(z, e, p)).collect();
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    let r_min = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let (_, half) = cfg.horizon_indices();
    let distances = map_paths(cfg.n_paths, |i| {
        Ok(min_distances(z, r_max, r_min, half, &cfg.driving(i)?, p))
    })?;
    radii
        .iter()
        .map(|&r| {
            let hits = distances.iter().filter(|d| d.1 <= r).count();
            let half_hits = distances.iter().filter(|d| d.0 <= r).count();
            Estimate::checked_proportion(hits, half_hits, cfg.n_paths)
        })
        .collect()
}

fn check_points(points: &[HPoint], eps: &[f64]) -> Result<()> {
    if points.is_empty() {
        return domain("multi-point estimate needs at least one point");
    }
    if points.len() != eps.len() {
        return Err(SleError::Config(format!(
            "{} points but {} eps values",
            points.len(),
            eps.len()
        )));
    }
    if let Some(&e) = eps.iter().find(|&&e| !(e > 0.0 && e.is_finite())) {
        return domain(format!("eps must be positive, got {e}"));
    }
    for (i, a) in points.iter().enumerate() {
        if points[i + 1..].contains(a) {
            return Err(SleError::Degenerate(format!("repeated point {a:?}")));
        }
    }
    Ok(())
}

fn path_first_passages(points: &[HPoint], eps: &[f64], driving: &DrivingPath, p: &SleParams) -> Vec<Option<usize>> {
    let starts: Vec<Option<usize>> = points
        .iter()
        .zip(eps)
        .map(|(&z, &e)| screen_start(z, e, driving, p))
        .collect();
    let mut first = vec![None; points.len()];
    let Some(from) = starts.iter().flatten().copied().min() else {
        return first;
    };
    let mut pending = starts.iter().filter(|s| s.is_some()).count();
    walk_tips(driving, p, from, |k, tip| {
        for (j, (z, &e)) in points.iter().zip(eps).enumerate() {
            if first[j].is_none() && starts[j].is_some_and(|s| s <= k) && (tip - z.to_complex()).norm() <= e {
                first[j] = Some(k);
                pending -= 1;
            }
        }
        if pending == 0 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    first
}

/// Per path, the first step at which each point is within its `eps` of a
/// tip (`None` if never within the horizon).
pub fn multipoint_first_passages(points: &[HPoint], eps: &[f64], cfg: &RunConfig) -> Result<Vec<Vec<Option<usize>>>> {
    check_points(points, eps)?;
    let p = &cfg.params;
    map_paths(cfg.n_paths, |i| Ok(path_first_passages(points, eps, &cfg.driving(i)?, p)))
}

/// Order of two passages at the same step, fixed by the points themselves so
/// that every permutation of a point set sees the same tie-break.
fn canonical(a: HPoint, b: HPoint) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn in_order(points: &[HPoint], passages: &[Option<usize>], limit: usize) -> bool {
    passages.iter().all(|&t| by(t, limit))
        && passages.windows(2).zip(points.windows(2)).all(|(t, z)| {
            t[0].cmp(&t[1]).then_with(|| canonical(z[0], z[1])) == Ordering::Less
        })
}

/// `P{τ¹ < τ² < … < τⁿ ≤ T}` for distance first passages `τʲ`; passages at
/// the same step are ordered by the points' coordinates.
pub fn estimate_ordered_multipoint(points: &[HPoint], eps: &[f64], cfg: &RunConfig) -> Result<Estimate> {
    let passages = multipoint_first_passages(points, eps, cfg)?;
    let (end, half) = cfg.horizon_indices();
    let count = |limit| passages.iter().filter(|t| in_order(points, t, limit)).count();
    Estimate::checked_proportion(count(end), count(half), cfg.n_paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loewner::tip_at;

    fn cfg(n: usize, horizon: f64) -> RunConfig {
        RunConfig::new(8.0 / 3.0, 1e-2, horizon, n, 5).unwrap()
    }

    fn brute_min_distance(z: HPoint, driving: &DrivingPath, p: &SleParams, upto: usize) -> f64 {
        (0..=upto)
            .map(|k| (tip_at(driving, p, k) - z.to_complex()).norm())
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn screened_distances_match_brute_force_below_radius() {
        let c = cfg(1, 1.0);
        let z = HPoint::new(0.2, 0.6).unwrap();
        for index in 0..20 {
            let d = c.driving(index).unwrap();
            let n = d.n_steps();
            let (h, e) = min_distances(z, 0.3, 0.0, n / 2, &d, &c.params);
            let (bh, be) = (
                brute_min_distance(z, &d, &c.params, n / 2),
                brute_min_distance(z, &d, &c.params, n),
            );
            assert!(if be <= 0.3 { e == be } else { e > 0.3 }, "{e} {be}");
            assert!(if bh <= 0.3 { h == bh } else { h > 0.3 }, "{h} {bh}");
        }
    }

    #[test]
    fn first_passages_match_brute_force() {
        let c = cfg(12, 1.0);
        let points = [HPoint::new(-0.3, 0.5).unwrap(), HPoint::new(0.3, 0.8).unwrap()];
        let eps = [0.2, 0.3];
        let got = multipoint_first_passages(&points, &eps, &c).unwrap();
        for (i, row) in got.iter().enumerate() {
            let d = c.driving(i as u64).unwrap();
            for (j, z) in points.iter().enumerate() {
                let brute = (0..=d.n_steps())
                    .find(|&k| (tip_at(&d, &c.params, k) - z.to_complex()).norm() <= eps[j]);
                assert_eq!(row[j], brute);
            }
        }
    }

    #[test]
    fn conditional_hit_is_below_unconditional() {
        let hits = estimate_boundary_hits(&[0.1, 0.25], &cfg(60, 2.0)).unwrap();
        for h in &hits {
            assert!(h.conditional.mean <= h.unconditional.mean);
        }
        assert!(hits[0].unconditional.mean <= hits[1].unconditional.mean);
    }

    #[test]
    fn boundary_hit_rejects_bad_y() {
        assert!(estimate_boundary_hit(0.3, &cfg(2, 1.0)).is_err());
        assert!(estimate_boundary_hit(0.0, &cfg(2, 1.0)).is_err());
    }

    #[test]
    fn phi_tail_is_monotone_and_validated() {
        let c = cfg(80, 1.0);
        let z = HPoint::new(0.0, 1.0).unwrap();
        let e = estimate_phi_tail(z, &[1.0, 0.5, 0.25], &c).unwrap();
        assert!(e[0].mean >= e[1].mean && e[1].mean >= e[2].mean);
        assert!(estimate_phi_tail(z, &[1.5], &c).is_err());
        assert!(estimate_phi_tail(z, &[0.0], &c).is_err());
    }

    #[test]
    fn phi_threshold_at_unit_height() {
        let p = SleParams::from_kappa(8.0 / 3.0).unwrap();
        let z = HPoint::new(0.0, 1.0).unwrap();
        assert!((phi_tail_threshold(z, 0.25, &p) - 0.25f64.powf(1.5)).abs() < 1e-12);
        let z2 = HPoint::new(0.0, 2.0).unwrap();
        assert!((phi_tail_threshold(z2, 0.25, &p) - 2.0 * 0.25f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn multipoint_validation() {
        let c = cfg(2, 1.0);
        let z = HPoint::new(0.0, 1.0).unwrap();
        assert!(matches!(estimate_ordered_multipoint(&[z], &[0.1, 0.2], &c), Err(SleError::Config(_))));
        assert!(matches!(estimate_ordered_multipoint(&[z, z], &[0.1, 0.2], &c), Err(SleError::Degenerate(_))));
        assert!(estimate_ordered_multipoint(&[], &[], &c).is_err());
    }
}

//! Monte Carlo estimators over independent Loewner paths.
//!
//! Every estimator draws path `i` from the driving stream `(seed, i)`, runs
//! the paths in parallel and folds the per-path outcomes in index order, so
//! results are bit-for-bit reproducible regardless of the thread count.
//!
//! Event probabilities are reported at the configured horizon `T`. The same
//! paths also give the estimate at `T/2`; when the two differ by at least the
//! confidence half-width the estimate is marked as truncation-suspect.

mod point_events;
mod trace_events;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Result, SleError};
use crate::loewner::{sample_driving, DrivingPath};
use crate::params::SleParams;

pub use point_events::{
    estimate_martingale, estimate_one_point, estimate_two_point, TwoPointResult,
};
pub use trace_events::{
    boundary_hit_radius, estimate_boundary_hit, estimate_boundary_hits, estimate_ordered_multipoint,
    estimate_phi_tail, multipoint_first_passages, phi_tail_threshold, BoundaryHit,
};

/// Confidence level used by every estimator.
pub const CONFIDENCE_LEVEL: f64 = 0.95;

/// Shared run parameters: the SLE parameter, the time grid and the sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: SleParams,
    /// Capacity-time step of the sampled driving function.
    pub dt: f64,
    /// Capacity-time horizon `T`.
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// Each sampled step is split into this many Brownian-bridge sub-steps
    /// before the flow runs (1 = no refinement).
    pub refinement: usize,
}

impl RunConfig {
    pub fn new(kappa: f64, dt: f64, horizon: f64, n_paths: usize, seed: u64) -> Result<Self> {
        let params = SleParams::from_kappa(kappa)?;
        let cfg = Self {
            params,
            dt,
            horizon,
            n_paths,
            seed,
            refinement: 1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn refined(mut self, factor: usize) -> Self {
        self.refinement = factor.max(1);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SleError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon >= self.dt && self.horizon.is_finite()) {
            return Err(SleError::Config(format!(
                "horizon must be at least one step, got {}",
                self.horizon
            )));
        }
        if self.n_paths == 0 {
            return Err(SleError::Config("n_paths must be positive".into()));
        }
        Ok(())
    }

    /// Number of coarse steps covering the horizon.
    pub fn n_steps(&self) -> usize {
        ((self.horizon / self.dt).round() as usize).max(1)
    }

    /// Step of the driving the flow actually runs on.
    pub fn effective_dt(&self) -> f64 {
        self.dt / self.refinement as f64
    }

    /// Driving for path `index` covering `n_coarse` coarse steps.
    pub(crate) fn driving_for(&self, index: u64, n_coarse: usize) -> Result<DrivingPath> {
        let coarse = sample_driving(self.dt, n_coarse, self.seed, index)?;
        if self.refinement > 1 {
            coarse.refine(self.refinement)
        } else {
            Ok(coarse)
        }
    }

    /// Driving for path `index` over the full horizon.
    pub(crate) fn driving(&self, index: u64) -> Result<DrivingPath> {
        self.driving_for(index, self.n_steps())
    }

    /// Grid index (on the effective grid) of the end of the horizon and of
    /// its midpoint.
    pub(crate) fn horizon_indices(&self) -> (usize, usize) {
        let n = self.n_steps() * self.refinement;
        (n, n / 2)
    }
}

/// Outcome of the horizon check: the same estimate with the horizon halved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationCheck {
    pub half_horizon_mean: f64,
    /// Halving the horizon moved the estimate by at least its confidence
    /// half-width.
    pub suspect: bool,
}

/// A Monte Carlo estimate with its 95% confidence interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_samples: usize,
    /// Number of successes, for binomial events.
    pub n_hits: Option<usize>,
    pub truncation: Option<TruncationCheck>,
}

impl Estimate {
    /// Binomial proportion with a Wilson interval.
    pub fn proportion(hits: usize, n: usize) -> Result<Self> {
        let (ci_low, ci_high) = wilson_interval(hits, n, CONFIDENCE_LEVEL)?;
        let mean = hits as f64 / n as f64;
        Ok(Self {
            mean,
            stderr: (mean * (1.0 - mean) / n as f64).sqrt(),
            ci_low,
            ci_high,
            n_samples: n,
            n_hits: Some(hits),
            truncation: None,
        })
    }

    /// Sample mean with a normal interval.
    pub fn sample_mean(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(SleError::Domain("sample mean of no values".into()));
        }
        let n = values.len() as f64;
        let mean = compensated_sum(values.iter().copied()) / n;
        let variance = if values.len() > 1 {
            compensated_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1.0)
        } else {
            0.0
        };
        let stderr = (variance / n).sqrt();
        let half = normal_quantile(CONFIDENCE_LEVEL) * stderr;
        Ok(Self {
            mean,
            stderr,
            ci_low: mean - half,
            ci_high: mean + half,
            n_samples: values.len(),
            n_hits: None,
            truncation: None,
        })
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }

    pub fn truncation_suspect(&self) -> bool {
        self.truncation.is_some_and(|t| t.suspect)
    }

    pub(crate) fn with_half_horizon(mut self, half_mean: f64) -> Self {
        self.truncation = Some(TruncationCheck {
            half_horizon_mean: half_mean,
            suspect: (self.mean - half_mean).abs() >= self.half_width(),
        });
        self
    }

    /// Proportion at the horizon, checked against the count at `T/2`.
    pub(crate) fn checked_proportion(hits: usize, half_hits: usize, n: usize) -> Result<Self> {
        Ok(Self::proportion(hits, n)?.with_half_horizon(half_hits as f64 / n as f64))
    }
}

fn normal_quantile(level: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + 0.5 * level)
}

/// Wilson score interval for `hits` successes out of `n` at the two-sided
/// confidence `level`.
pub fn wilson_interval(hits: usize, n: usize, level: f64) -> Result<(f64, f64)> {
    if n == 0 || hits > n {
        return Err(SleError::Domain(format!(
            "wilson interval needs 0 ≤ hits ≤ n and n ≥ 1, got {hits}/{n}"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(SleError::Domain(format!("confidence level must be in (0,1), got {level}")));
    }
    let z = normal_quantile(level);
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let spread = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    // The bounds are exactly 0 and 1 at the extremes; pin them against rounding.
    let low = if hits == 0 { 0.0 } else { (center - spread).max(0.0) };
    let high = if hits == n { 1.0 } else { (center + spread).min(1.0) };
    Ok((low, high))
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Runs `per_path` for every path index in parallel and returns the outcomes
/// in index order.
pub(crate) fn map_paths<T, F>(n_paths: usize, per_path: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..n_paths as u64).into_par_iter().map(per_path).collect()
}

/// First-passage step at or below `limit`.
pub(crate) fn by(index: Option<usize>, limit: usize) -> bool {
    index.is_some_and(|k| k <= limit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_matches_reference_values() {
        let (lo, hi) = wilson_interval(50, 100, 0.95).unwrap();
        assert!((lo - 0.4038).abs() < 5e-4 && (hi - 0.5962).abs() < 5e-4, "{lo} {hi}");
        let (lo, hi) = wilson_interval(0, 40, 0.95).unwrap();
        let z2 = 1.959963984540054f64.powi(2);
        assert_eq!(lo, 0.0);
        assert!((hi - z2 / (40.0 + z2)).abs() < 1e-12);
        let (lo, hi) = wilson_interval(40, 40, 0.95).unwrap();
        assert!(lo < 1.0 && hi == 1.0);
    }

    #[test]
    fn wilson_rejects_bad_input() {
        assert!(wilson_interval(3, 2, 0.95).is_err());
        assert!(wilson_interval(0, 0, 0.95).is_err());
        assert!(wilson_interval(1, 2, 1.0).is_err());
    }

    #[test]
    fn compensated_sum_beats_naive_cancellation() {
        let values = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(values.iter().copied()), 2.0);
    }

    #[test]
    fn sample_mean_of_constant_has_zero_width() {
        let e = Estimate::sample_mean(&[0.5; 10]).unwrap();
        assert_eq!((e.mean, e.stderr, e.ci_low, e.ci_high), (0.5, 0.0, 0.5, 0.5));
    }

    #[test]
    fn run_config_validation() {
        assert!(RunConfig::new(8.0 / 3.0, 0.0, 1.0, 10, 1).is_err());
        assert!(RunConfig::new(8.0 / 3.0, 1e-3, 1e-4, 10, 1).is_err());
        assert!(RunConfig::new(8.0 / 3.0, 1e-3, 1.0, 0, 1).is_err());
        assert!(RunConfig::new(9.0, 1e-3, 1.0, 10, 1).is_err());
        let cfg = RunConfig::new(4.0, 1e-3, 1.0, 10, 1).unwrap();
        assert_eq!(cfg.n_steps(), 1000);
        assert_eq!(cfg.clone().refined(10).horizon_indices(), (10000, 5000));
    }
}

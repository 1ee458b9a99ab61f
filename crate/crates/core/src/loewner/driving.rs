use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Mixed into the run seed for bridge-refinement streams so they never
/// collide with the coarse increment stream.
const BRIDGE_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Piecewise-constant Brownian driving sampled on a uniform capacity-time grid.
///
/// `cumulative[k]` is `U` at time `k·dt`; `increments[k]` is the jump applied
/// during step `k + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrivingPath {
    pub dt: f64,
    pub increments: Vec<f64>,
    pub cumulative: Vec<f64>,
    pub seed: u64,
    pub path_index: u64,
    /// Number of bridge refinements applied to the original coarse path.
    pub refinement: u32,
}

fn stream(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    rng
}

/// Samples `n_steps` i.i.d. `N(0, dt)` increments from the ChaCha stream
/// selected by `(seed, path_index)`.
///
/// The stream is consumed sequentially, so a longer path with the same seed
/// and index extends a shorter one.
pub fn sample_driving(dt: f64, n_steps: usize, seed: u64, path_index: u64) -> Result<DrivingPath> {
    if !(dt > 0.0) || !dt.is_finite() {
        return domain(format!("dt must be positive, got {dt}"));
    }
    if n_steps == 0 {
        return domain("driving path needs at least one step");
    }
    let mut rng = stream(seed, path_index);
    let sd = dt.sqrt();
    let increments: Vec<f64> = (0..n_steps)
        .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(DrivingPath::from_increments(dt, increments, seed, path_index))
}

impl DrivingPath {
    pub fn from_increments(dt: f64, increments: Vec<f64>, seed: u64, path_index: u64) -> Self {
        let mut cumulative = Vec::with_capacity(increments.len() + 1);
        let mut u = 0.0;
        cumulative.push(u);
        for &du in &increments {
            u += du;
            cumulative.push(u);
        }
        Self {
            dt,
            increments,
            cumulative,
            seed,
            path_index,
            refinement: 0,
        }
    }

    /// A path with all increments zero.
    pub fn zero(dt: f64, n_steps: usize) -> Self {
        Self::from_increments(dt, vec![0.0; n_steps], 0, 0)
    }

    pub fn n_steps(&self) -> usize {
        self.increments.len()
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.n_steps() as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.dt * k as f64
    }

    /// Reflection `U ↦ −U`.
    pub fn negated(&self) -> Self {
        let mut out = Self::from_increments(
            self.dt,
            self.increments.iter().map(|x| -x).collect(),
            self.seed,
            self.path_index,
        );
        out.refinement = self.refinement;
        out
    }

    /// The first `n_steps` steps of this path.
    pub fn truncated(&self, n_steps: usize) -> Self {
        let n = n_steps.min(self.n_steps());
        Self {
            dt: self.dt,
            increments: self.increments[..n].to_vec(),
            cumulative: self.cumulative[..=n].to_vec(),
            seed: self.seed,
            path_index: self.path_index,
            refinement: self.refinement,
        }
    }

    /// Splits every step into `factor` sub-steps by sampling the Brownian
    /// bridge between the existing grid values, so the refined path passes
    /// through the same values at the coarse grid times (up to rounding of the
    /// partial sums). `factor = 2` is midpoint refinement.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor < 2 {
            return domain(format!("refinement factor must be at least 2, got {factor}"));
        }
        let level = self.refinement + 1;
        let mut rng = stream(self.seed ^ BRIDGE_SALT.wrapping_mul(level as u64), self.path_index);
        let h = self.dt / factor as f64;
        let mut fine = Vec::with_capacity(self.n_steps() * factor);
        for &du in &self.increments {
            let mut remaining = du;
            for j in 0..factor - 1 {
                let left = (factor - j) as f64;
                let mean = remaining / left;
                let var = h * (left - 1.0) / left;
                let x = mean + var.sqrt() * rng.sample::<f64, _>(StandardNormal);
                fine.push(x);
                remaining -= x;
            }
            fine.push(remaining);
        }
        let mut out = Self::from_increments(h, fine, self.seed, self.path_index);
        out.refinement = level;
        Ok(out)
    }
}

//! Derived SLE_κ constants.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature::adaptive_simpson;

/// Absolute tolerance for the quadrature behind [`c_star`].
pub const C_STAR_QUAD_TOL: f64 = 1e-10;

/// Constants derived from κ.
///
/// * `a = 2/κ` is the Loewner speed in `ġ = a/(g − U)`.
/// * `d = 1 + κ/8` is the dimension of the curve.
/// * `beta = κ/8 + 8/κ − 2 = (4a − 1) − (2 − d)` is the two-point envelope exponent.
/// * `c_star = 2/∫₀^π sin^{4a}x dx` is the conformal-radius one-point constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SleParams {
    pub kappa: f64,
    pub a: f64,
    pub d: f64,
    pub beta: f64,
    pub c_star: f64,
}

impl SleParams {
    pub fn from_kappa(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 8.0) {
            return domain(format!("kappa must lie in (0, 8), got {kappa}"));
        }
        let a = 2.0 / kappa;
        Ok(Self {
            kappa,
            a,
            d: 1.0 + kappa / 8.0,
            beta: kappa / 8.0 + 8.0 / kappa - 2.0,
            c_star: c_star(a)?,
        })
    }

    /// Boundary exponent `4a − 1`.
    pub fn boundary_exponent(&self) -> f64 {
        4.0 * self.a - 1.0
    }

    /// Interior exponent `2 − d`.
    pub fn interior_exponent(&self) -> f64 {
        2.0 - self.d
    }
}

/// Convenience wrapper for [`SleParams::from_kappa`].
pub fn params_from_kappa(kappa: f64) -> Result<SleParams> {
    SleParams::from_kappa(kappa)
}

/// `c_* = 2 [∫₀^π sin^{4a}x dx]^{-1}`, for `a > 1/4`.
pub fn c_star(a: f64) -> Result<f64> {
    if !(a > 0.25) || !a.is_finite() {
        return domain(format!("c_star requires a > 1/4, got {a}"));
    }
    let power = 4.0 * a;
    let integral = adaptive_simpson(|x| x.sin().max(0.0).powf(power), 0.0, PI, C_STAR_QUAD_TOL);
    Ok(2.0 / integral)
}

//! Closed-form Green's function quantities in the upper half-plane.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SleError};
use crate::params::SleParams;

/// A point of the open upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub re: f64,
    pub im: f64,
}

impl HPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(im > 0.0) || !re.is_finite() || !im.is_finite() {
            return domain(format!("point {re}{im:+}i is not in the open upper half-plane"));
        }
        Ok(Self { re, im })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm(self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Argument in `(0, π)`.
    pub fn arg(self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn scale(self, r: f64) -> Result<Self> {
        Self::new(r * self.re, r * self.im)
    }
}

impl fmt::Display for HPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.re, self.im)
    }
}

/// `sin arg z = Im z / |z|`.
pub fn sin_arg(z: HPoint) -> f64 {
    z.im / z.norm()
}

/// `G(z) = Im(z)^{d−2} [sin arg z]^{4a−1}`.
pub fn green_one_point(z: HPoint, p: &SleParams) -> f64 {
    z.im.powf(p.d - 2.0) * sin_arg(z).powf(p.boundary_exponent())
}

/// Same as [`green_one_point`] for a raw complex number; errors off the open
/// upper half-plane.
pub fn green_at(z: Complex64, p: &SleParams) -> Result<f64> {
    Ok(green_one_point(HPoint::from_complex(z)?, p))
}

/// Pulls a Green's function value back through a conformal map whose
/// derivative modulus at the point is `abs_deriv`: `|f'|^{2−d} G(f(z))`.
pub fn green_covariant(abs_deriv: f64, g_image: f64, p: &SleParams) -> Result<f64> {
    if !(abs_deriv > 0.0) || !(g_image > 0.0) {
        return domain(format!(
            "covariance needs positive inputs, got |f'|={abs_deriv}, G={g_image}"
        ));
    }
    Ok(abs_deriv.powf(2.0 - p.d) * g_image)
}

/// Normalized separation `q = |w − z|/|w|` after ordering so that `|z| ≤ |w|`.
/// Returns `(q, z, w)` in that order.
pub fn ordered_separation(z: HPoint, w: HPoint) -> (f64, HPoint, HPoint) {
    let (z, w) = if z.norm() <= w.norm() { (z, w) } else { (w, z) };
    let q = (w.to_complex() - z.to_complex()).norm() / w.norm();
    (q, z, w)
}

/// Two-point envelope `q^{d−2} [S(w) ∨ q]^{−β} G(z) G(w)` for `|z| ≤ |w|`;
/// the arguments are reordered internally.
pub fn two_point_envelope(z: HPoint, w: HPoint, p: &SleParams) -> Result<f64> {
    if z == w {
        return Err(SleError::Degenerate(
            "two-point envelope diverges at z = w".into(),
        ));
    }
    let (q, z, w) = ordered_separation(z, w);
    let shape = q.powf(p.d - 2.0) * sin_arg(w).max(q).powf(-p.beta);
    Ok(shape * green_one_point(z, p) * green_one_point(w, p))
}

/// Φ in terms of distance `delta` to the curve and `im_z = Im z`:
/// `delta^{4a−1}` when `delta ≥ im_z`, else `im_z^{4a−1} (delta/im_z)^{2−d}`.
pub fn phi_value(delta: f64, im_z: f64, p: &SleParams) -> Result<f64> {
    if !(delta > 0.0) || !(im_z > 0.0) {
        return domain(format!("phi needs delta > 0 and Im z > 0, got {delta}, {im_z}"));
    }
    Ok(phi_unchecked(delta, im_z, p))
}

#[inline]
pub(crate) fn phi_unchecked(delta: f64, im_z: f64, p: &SleParams) -> f64 {
    if delta >= im_z {
        delta.powf(p.boundary_exponent())
    } else {
        im_z.powf(p.boundary_exponent()) * (delta / im_z).powf(p.interior_exponent())
    }
}

/// Inverse of Φ in `delta` for fixed `im_z`: the largest distance whose Φ is
/// at most `phi`.
pub fn phi_distance_threshold(phi: f64, im_z: f64, p: &SleParams) -> f64 {
    let boundary = im_z.powf(p.boundary_exponent());
    if phi >= boundary {
        phi.powf(1.0 / p.boundary_exponent())
    } else {
        im_z * (phi / boundary).powf(1.0 / p.interior_exponent())
    }
}

/// Harmonic measure from `z` of `(−∞, 0)` and `(0, ∞)` in the half-plane.
pub fn exact_hm_halfplane(z: HPoint) -> (f64, f64) {
    let theta = z.arg() / PI;
    (theta, 1.0 - theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p83() -> SleParams {
        SleParams::from_kappa(8.0 / 3.0).unwrap()
    }

    fn pt(re: f64, im: f64) -> HPoint {
        HPoint::new(re, im).unwrap()
    }

    #[test]
    fn green_values() {
        for k in [1.0, 8.0 / 3.0, 4.0, 6.0] {
            let p = SleParams::from_kappa(k).unwrap();
            assert!((green_one_point(pt(0.0, 1.0), &p) - 1.0).abs() < 1e-15);
        }
        let p = p83();
        assert!((green_one_point(pt(0.0, 2.0), &p) - 2f64.powf(-2.0 / 3.0)).abs() < 1e-12);
        assert!((green_one_point(pt(1.0, 1.0), &p) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sin_arg_values() {
        assert_eq!(sin_arg(pt(0.0, 1.0)), 1.0);
        assert!((sin_arg(pt(1.0, 1.0)) - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((sin_arg(pt(-3.0, 4.0)) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(HPoint::new(0.0, 0.0).is_err());
        assert!(HPoint::new(1.0, -1.0).is_err());
        assert!(green_at(Complex64::new(1.0, 0.0), &p83()).is_err());
    }

    #[test]
    fn covariance_cases() {
        let p = p83();
        assert_eq!(green_covariant(1.0, 0.37, &p).unwrap(), 0.37);
        let g2i = green_one_point(pt(0.0, 2.0), &p);
        assert!((green_covariant(2.0, g2i, &p).unwrap() - 1.0).abs() < 1e-12);
        // F(z) = z + 1 maps (H; 0, ∞) to (H; 1, ∞), where G_{H;1,∞}(u) = G(u − 1).
        let z = pt(0.3, 0.7);
        let image = pt(z.re + 1.0, z.im);
        let g_image = green_one_point(pt(image.re - 1.0, image.im), &p);
        assert_eq!(green_covariant(1.0, g_image, &p).unwrap(), green_one_point(z, &p));
        assert!(green_covariant(0.0, 1.0, &p).is_err());
        assert!(green_covariant(1.0, -1.0, &p).is_err());
    }

    #[test]
    fn envelope_examples() {
        let p = p83();
        let v = two_point_envelope(pt(0.0, 0.9), pt(0.0, 1.0), &p).unwrap();
        assert!((v - 0.09f64.powf(-2.0 / 3.0)).abs() < 1e-12, "{v}");
        assert!((v - 4.980_2).abs() < 1e-3);
        let v = two_point_envelope(pt(0.0, 0.5), pt(0.0, 1.0), &p).unwrap();
        assert!((v - 0.5f64.powf(-4.0 / 3.0)).abs() < 1e-12);
        assert!(two_point_envelope(pt(0.2, 1.0), pt(0.2, 1.0), &p).is_err());
    }

    #[test]
    fn phi_examples() {
        let p = SleParams::from_kappa(4.0).unwrap();
        assert!((phi_value(2.0, 1.0, &p).unwrap() - 2.0).abs() < 1e-15);
        assert!((phi_value(0.5, 1.0, &p).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        // at t = 0 the distance to the (empty) curve is |z|
        let p = p83();
        let z = pt(3.0, 4.0);
        let phi0 = phi_value(z.norm(), z.im, &p).unwrap();
        assert!((phi0 - 5f64.powf(4.0 * p.a - 1.0)).abs() < 1e-12);
        assert!(phi_value(0.0, 1.0, &p).is_err());
        assert!(phi_value(1.0, 0.0, &p).is_err());
    }

    #[test]
    fn phi_threshold_inverts_phi() {
        let p = p83();
        for &(phi, im) in &[(0.5, 1.0), (0.125, 1.0), (3.0, 1.0), (0.01, 2.0)] {
            let d = phi_distance_threshold(phi, im, &p);
            assert!((phi_value(d, im, &p).unwrap() - phi).abs() < 1e-12 * phi.max(1.0));
        }
    }

    #[test]
    fn harmonic_measure_examples() {
        let (l, r) = exact_hm_halfplane(pt(0.0, 1.0));
        assert!((l - 0.5).abs() < 1e-15 && (r - 0.5).abs() < 1e-15);
        let (l, r) = exact_hm_halfplane(pt(1.0, 1.0));
        assert!((l - 0.25).abs() < 1e-15 && (r - 0.75).abs() < 1e-15);
        let (l, r) = exact_hm_halfplane(pt(-1.0, 1.0));
        assert!((l - 0.75).abs() < 1e-15 && (r - 0.25).abs() < 1e-15);
    }
}

use num_complex::Complex64;

/// Principal square root (`Re ≥ 0`), without the polar round trip that
/// `Complex64::sqrt` takes.
#[inline]
fn principal_sqrt(u: Complex64) -> Complex64 {
    let r = (u.re * u.re + u.im * u.im).sqrt();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if u.re >= 0.0 {
        let t = (0.5 * (r + u.re)).sqrt();
        Complex64::new(t, u.im / (2.0 * t))
    } else {
        let t = (0.5 * (r - u.re)).sqrt();
        Complex64::new(u.im.abs() / (2.0 * t), t.copysign(u.im))
    }
}

/// Square root of `u` on the closed upper half-plane. When the root is real,
/// the sign follows `side` (the real part of the pre-image), so that real
/// points keep their side of the slit.
#[inline]
pub fn upper_sqrt(u: Complex64, side: f64) -> Complex64 {
    let s = principal_sqrt(u);
    if s.im < 0.0 || (s.im == 0.0 && side < 0.0) {
        -s
    } else {
        s
    }
}

/// One exact step of `ż = a/z` over time `delta`: `√(w² + 2aδ)` on the upper
/// branch. A real result for `Im w > 0` means the point was hit by the slit.
#[inline]
pub fn slit_step(w: Complex64, a: f64, delta: f64) -> Complex64 {
    upper_sqrt(w * w + 2.0 * a * delta, w.re)
}

/// `|d/dw √(w² + c)| = |w| / |√(w² + c)|`, given the step output.
#[inline]
pub fn slit_step_factor(w: Complex64, image: Complex64) -> f64 {
    (w.norm_sqr() / image.norm_sqr()).sqrt()
}

/// Inverse of [`slit_step`] with capacity `cap = 2aδ`: `√(w² − cap)` on the
/// upper branch.
#[inline]
pub fn inverse_slit_step(w: Complex64, cap: f64) -> Complex64 {
    upper_sqrt(w * w - cap, w.re)
}

/// Closed-form flow for `U ≡ 0`: `g_t(z) = √(z² + 2at)`.
pub fn solve_constant_driving(z: Complex64, a: f64, t: f64) -> Complex64 {
    if t == 0.0 {
        return z;
    }
    upper_sqrt(z * z + 2.0 * a * t, z.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn step_examples() {
        let v = slit_step(c(0.0, 2.0), 1.0, 0.5);
        assert!((v - c(0.0, 3f64.sqrt())).norm() < 1e-15);
        let v = slit_step(c(1.0, 1.0), 1.0, 0.5);
        assert!((v - c(1.272_019_649_514_069, 0.786_151_377_757_423_3)).norm() < 1e-12);
        let v = slit_step(c(0.0, 1.0), 1.0, 0.5);
        assert_eq!(v.norm(), 0.0);
    }

    #[test]
    fn constant_driving_examples() {
        assert!((solve_constant_driving(c(0.0, 2.0), 1.0, 0.5) - c(0.0, 3f64.sqrt())).norm() < 1e-15);
        assert_eq!(solve_constant_driving(c(0.0, 1.0), 1.0, 0.5).norm(), 0.0);
        assert_eq!(solve_constant_driving(c(0.3, 0.2), 1.0, 0.0), c(0.3, 0.2));
    }

    #[test]
    fn principal_sqrt_agrees_with_num_complex() {
        for &(x, y) in &[(1.0, 2.0), (-3.0, 0.5), (-3.0, -0.5), (0.0, 4.0), (2.0, -7.0), (-1e-8, 1e3)] {
            let u = c(x, y);
            assert!((principal_sqrt(u) - u.sqrt()).norm() < 1e-14 * u.norm().sqrt().max(1.0));
        }
    }

    #[test]
    fn real_points_keep_their_side() {
        assert!(slit_step(c(-2.0, 0.0), 1.0, 0.5).re < -2.0);
        assert!(slit_step(c(2.0, 0.0), 1.0, 0.5).re > 2.0);
        assert!(inverse_slit_step(c(-2.0, 0.0), 1.0).re < 0.0);
        assert!(inverse_slit_step(c(0.5, 0.0), 1.0).im > 0.0);
    }

    #[test]
    fn inverse_undoes_step() {
        for &(x, y) in &[(0.3, 0.2), (-1.5, 0.01), (4.0, 3.0), (0.0, 0.5)] {
            let w = c(x, y);
            let v = slit_step(w, 0.75, 1e-3);
            assert!((inverse_slit_step(v, 1.5e-3) - w).norm() < 1e-12);
        }
    }
}

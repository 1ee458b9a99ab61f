//! Adaptive Simpson quadrature.

const MAX_DEPTH: u32 = 50;

/// Integrates `f` over `[lo, hi]` with adaptive Simpson refinement until the
/// Richardson error estimate of every accepted panel is within its share of
/// `abs_tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, abs_tol: f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    let (f_lo, f_mid, f_hi) = (f(lo), f(mid), f(hi));
    let whole = simpson(lo, hi, f_lo, f_mid, f_hi);
    refine(&f, lo, hi, f_lo, f_mid, f_hi, whole, abs_tol, MAX_DEPTH)
}

fn simpson(lo: f64, hi: f64, f_lo: f64, f_mid: f64, f_hi: f64) -> f64 {
    (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_mid: f64,
    f_hi: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let mid = 0.5 * (lo + hi);
    let left_mid = 0.5 * (lo + mid);
    let right_mid = 0.5 * (mid + hi);
    let f_lm = f(left_mid);
    let f_rm = f(right_mid);
    let left = simpson(lo, mid, f_lo, f_lm, f_mid);
    let right = simpson(mid, hi, f_mid, f_rm, f_hi);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, lo, mid, f_lo, f_lm, f_mid, left, 0.5 * tol, depth - 1)
        + refine(f, mid, hi, f_mid, f_rm, f_hi, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12);
        assert!((v - 0.0).abs() < 1e-12);
    }

    #[test]
    fn sine_powers_match_closed_forms() {
        let two = adaptive_simpson(|x: f64| x.sin().powi(2), 0.0, PI, 1e-12);
        assert!((two - PI / 2.0).abs() < 1e-10);
        let four = adaptive_simpson(|x: f64| x.sin().powi(4), 0.0, PI, 1e-12);
        assert!((four - 3.0 * PI / 8.0).abs() < 1e-10);
    }

    #[test]
    fn fractional_power_with_endpoint_cusp() {
        // ∫_0^π sin^{1/2}: Wallis value via Γ(3/4)/Γ(5/4)·√π = 2.396280469471184
        let v = adaptive_simpson(|x: f64| x.sin().max(0.0).sqrt(), 0.0, PI, 1e-12);
        assert!((v - 2.396_280_469_471_184).abs() < 1e-8, "{v}");
    }
}

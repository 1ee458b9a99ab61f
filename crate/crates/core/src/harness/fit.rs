//! Least-squares exponent fits on log-log scale.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, SleError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 when the ys are constant.
    pub r_squared: f64,
    pub n_points: usize,
}

/// Fits `log y = intercept + slope · log x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return domain(format!("log-log fit needs two equal-length lists of ≥ 2 values, got {} and {}", xs.len(), ys.len()));
    }
    if let Some(v) = xs.iter().chain(ys).find(|&&v| !(v > 0.0 && v.is_finite())) {
        return domain(format!("log-log fit needs positive values, got {v}"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(SleError::Degenerate("log-log fit needs at least two distinct xs".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let sse: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        n_points: xs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let xs = [0.5, 1.0, 2.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x * x).collect();
        let f = fit_loglog_slope(&xs, &ys).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(f.n_points, 4);
    }

    #[test]
    fn constant_ys_have_zero_slope() {
        let f = fit_loglog_slope(&[1.0, 2.0, 3.0], &[5.0; 3]).unwrap();
        assert!(f.slope.abs() < 1e-15);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_loglog_slope(&[1.0], &[1.0]).is_err());
        assert!(fit_loglog_slope(&[1.0, 2.0], &[1.0]).is_err());
        assert!(fit_loglog_slope(&[1.0, -2.0], &[1.0, 1.0]).is_err());
        assert!(fit_loglog_slope(&[1.0, 2.0], &[0.0, 1.0]).is_err());
        assert!(matches!(fit_loglog_slope(&[2.0, 2.0], &[1.0, 3.0]), Err(SleError::Degenerate(_))));
    }
}

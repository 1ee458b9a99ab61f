//! The discrete flow against closed forms.

use num_complex::Complex64;

use sle_lab::green::HPoint;
use sle_lab::loewner::{
    evolve_tracked_point, farfield_check, sample_driving, solve_constant_driving, tip_at, trace_curve, DrivingPath,
};
use sle_lab::SleParams;

fn starts() -> Vec<HPoint> {
    (0..20)
        .map(|i| {
            let t = i as f64;
            HPoint::new(-2.0 + 0.21 * t, 0.05 + 0.13 * t).unwrap()
        })
        .collect()
}

#[test]
fn zero_driving_matches_the_square_root_flow() {
    let p = SleParams::from_kappa(8.0 / 3.0).unwrap();
    let (dt, n) = (1e-3, 1000);
    let driving = DrivingPath::zero(dt, n);
    for z in starts() {
        let (_, samples) = evolve_tracked_point(z, &driving, &p, None, true);
        let samples = samples.unwrap();
        for (k, s) in samples.iter().enumerate() {
            let exact = solve_constant_driving(z.to_complex(), p.a, driving.time(k));
            assert!((s.z_t - exact).norm() <= 1e-12 * exact.norm().max(1.0), "z={z} k={k}");
        }
        // Off the imaginary axis, `z² + 2at` never becomes real, so the point
        // is followed through every grid time.
        assert_eq!(samples.len(), n + 1, "z={z}");
    }
}

#[test]
fn zero_driving_grows_a_vertical_slit() {
    let p = SleParams::from_kappa(4.0).unwrap();
    let driving = DrivingPath::zero(1e-3, 500);
    let trace = trace_curve(&driving, &p);
    for (k, tip) in trace.points.iter().enumerate() {
        let height = (2.0 * p.a * driving.time(k)).sqrt();
        assert!(tip.re.abs() < 1e-12 && (tip.im - height).abs() < 1e-12, "k={k} tip={tip}");
    }
}

#[test]
fn mirror_symmetry_is_exact() {
    let p = SleParams::from_kappa(8.0 / 3.0).unwrap();
    let driving = sample_driving(1e-3, 400, 17, 0).unwrap();
    let mirrored = driving.negated();
    for k in [0, 1, 57, 399, 400] {
        let a = tip_at(&driving, &p, k);
        assert_eq!(tip_at(&mirrored, &p, k), Complex64::new(-a.re, a.im));
    }
    let z = HPoint::new(0.4, 0.7).unwrap();
    let zm = HPoint::new(-0.4, 0.7).unwrap();
    let (a, _) = evolve_tracked_point(z, &driving, &p, None, false);
    let (b, _) = evolve_tracked_point(zm, &mirrored, &p, None, false);
    assert_eq!(a.upsilon, b.upsilon);
    assert_eq!(a.z_t.re, -b.z_t.re);
}

#[test]
fn far_field_remainder_is_bounded_over_seeds() {
    let p = SleParams::from_kappa(8.0 / 3.0).unwrap();
    let bound = 10.0 * p.a * p.a;
    for seed in 0..100 {
        let driving = sample_driving(1e-3, 1000, seed, 0).unwrap();
        let r = farfield_check(&driving, &p, Complex64::new(600.0, 800.0));
        assert!(r.is_finite() && r <= bound, "seed {seed}: {r}");
    }
}

#[test]
fn upsilon_agrees_with_a_bridge_refined_run() {
    let p = SleParams::from_kappa(8.0 / 3.0).unwrap();
    let z = HPoint::new(0.0, 1.0).unwrap();
    let coarse = sample_driving(1e-3, 1000, 42, 0).unwrap();
    let fine = coarse.refine(10).unwrap();
    let (a, _) = evolve_tracked_point(z, &coarse, &p, None, false);
    let (b, _) = evolve_tracked_point(z, &fine, &p, None, false);
    assert!(!a.swallowed && !b.swallowed);
    assert!((a.upsilon / b.upsilon - 1.0).abs() < 0.01, "{} {}", a.upsilon, b.upsilon);
}

mod common;

use common::{
    e1_reference, e1_series, j0_reference, phi_reference, scaled_e1_fraction, theta_reference,
};
use proptest::prelude::*;
use relaycap::specfun::{bessel_j0, exp_e1, exp_scaled_e1, phi, theta};

#[test]
fn reference_j0_agrees_with_the_hankel_expansion() {
    // two terms each of P and Q leave ~3e-10 at x = 40
    let x: f64 = 40.0;
    let chi = x - std::f64::consts::FRAC_PI_4;
    let p = 1.0 - 9.0 / (128.0 * x * x) + 3675.0 / (32768.0 * x.powi(4));
    let q = -1.0 / (8.0 * x) + 75.0 / (1024.0 * x.powi(3));
    let hankel = (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin());
    assert!((j0_reference(x) - hankel).abs() < 1e-9);
}

#[test]
fn j0_matches_exact_series_on_0_to_50() {
    let mut worst: f64 = 0.0;
    for i in 0..=2000 {
        let x = i as f64 * 0.025 + 1e-3 * (i % 7) as f64;
        if x > 50.0 {
            continue;
        }
        worst = worst.max((bessel_j0(x).unwrap() - j0_reference(x)).abs());
    }
    assert!(worst < 1e-12, "worst absolute error {worst:e}");
}

#[test]
fn j0_first_zero() {
    assert!(bessel_j0(2.404825557695773).unwrap().abs() < 1e-10);
    assert!(j0_reference(2.404825557695773).abs() < 1e-15);
}

#[test]
fn j0_at_the_fast_fading_correlation_argument() {
    let x = 2.0 * std::f64::consts::PI * 0.3;
    assert!((bessel_j0(x).unwrap() - j0_reference(x)).abs() < 1e-15);
}

#[test]
fn e1_references_agree_where_both_apply() {
    for i in 0..=20 {
        let x = 1.0 + 0.05 * i as f64;
        let a = e1_series(x);
        let b = (-x).exp() * scaled_e1_fraction(x);
        assert!(((a - b) / b).abs() < 2e-15, "{x}: {a} vs {b}");
    }
    assert!((e1_series(1.0) - 0.219_383_934_395_520_27).abs() < 1e-16);
}

#[test]
fn e1_relative_error_on_log_grid() {
    let mut worst: f64 = 0.0;
    let (lo, hi) = (1e-4f64.ln(), 700f64.ln());
    for i in 0..=400 {
        let x = (lo + (hi - lo) * i as f64 / 400.0).exp();
        let want = e1_reference(x);
        worst = worst.max(((exp_e1(x).unwrap() - want) / want).abs());
    }
    assert!(worst < 1e-12, "worst relative error {worst:e}");
}

#[test]
fn scaled_e1_examples() {
    let big = exp_scaled_e1(1000.0).unwrap();
    assert!(big.is_finite() && ((big - 1e-3) / 1e-3).abs() < 0.01);
    assert!(((exp_scaled_e1(1000.0).unwrap() - scaled_e1_fraction(1000.0)) / big).abs() < 1e-14);
    let e = std::f64::consts::E;
    assert!((exp_scaled_e1(1.0).unwrap() - e * exp_e1(1.0).unwrap()).abs() < 1e-12);
    assert!((exp_scaled_e1(0.01).unwrap() - 0.01f64.exp() * e1_series(0.01)).abs() < 1e-12);
    for x in [700.0, 1e4, 1e8] {
        let v = exp_scaled_e1(x).unwrap();
        assert!(((v - scaled_e1_fraction(x)) / v).abs() < 1e-13, "{x}");
    }
}

#[test]
fn e1_sandwich() {
    for x in [0.1f64, 1.0, 10.0] {
        let v = exp_e1(x).unwrap();
        let lower = 0.5 * (-x).exp() * (1.0 + 2.0 / x).ln();
        let upper = (-x).exp() * (1.0 + 1.0 / x).ln();
        assert!(lower < v && v < upper, "{x}");
    }
}

#[test]
fn phi_matches_quadrature_on_grid() {
    for a in [0.5, 1.0, 5.0] {
        for b in [0.1, 1.0, 10.0] {
            let want = phi_reference(a, b);
            let got = phi(a, b).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-8,
                "phi({a}, {b}) = {got}, want {want}"
            );
        }
    }
}

#[test]
fn phi_examples() {
    for b in [0.3, 1.0, 7.0] {
        let want = exp_scaled_e1(b).unwrap() / b;
        assert!(((phi(1.0, b).unwrap() - want) / want).abs() < 1e-15);
    }
    let a = 1e6;
    assert!((phi(a, 1.0).unwrap() - a.ln()).abs() < 1e-5);
}

#[test]
fn theta_matches_double_integral_on_grid() {
    for a in [0.5, 2.0] {
        for (m, n) in [(0.5, 1.5), (1.0, 1.0), (2.0, 0.3)] {
            let want = theta_reference(a, m, n);
            let got = theta(a, m, n).unwrap();
            assert!(
                ((got - want) / want).abs() < 1e-6,
                "theta({a}, {m}, {n}) = {got}, want {want}"
            );
        }
    }
}

#[test]
fn theta_at_large_rates_is_small_and_positive() {
    let v = theta(1.0, 100.0, 100.0).unwrap();
    assert!(v > 0.0 && v < 1e-4);
}

proptest! {
    #[test]
    fn j0_is_even_and_bounded(x in -200.0f64..200.0) {
        let v = bessel_j0(x).unwrap();
        prop_assert_eq!(v, bessel_j0(-x).unwrap());
        prop_assert!(v.abs() <= 1.0);
    }

    #[test]
    fn e1_is_decreasing(x in 1e-4f64..600.0, dx in 1e-6f64..10.0) {
        prop_assert!(exp_e1(x).unwrap() > exp_e1(x + dx).unwrap());
    }

    #[test]
    fn phi_positive_for_unit_shift_and_above(a in 1.0f64..1e3, b in 1e-3f64..1e3) {
        prop_assert!(phi(a, b).unwrap() > 0.0);
    }

    #[test]
    fn theta_branches_agree_near_the_diagonal(a in 0.01f64..100.0, m in 1e-3f64..1e3, rel in -1e-5f64..1e-5) {
        let on = theta(a, m, m).unwrap();
        let off = theta(a, m, m * (1.0 + rel)).unwrap();
        // the exact function changes by about |rel| / 2 relative over this gap
        prop_assert!(((on - off) / on).abs() < 1e-6 + rel.abs());
    }

    #[test]
    fn theta_is_symmetric_in_rates(a in 0.01f64..100.0, m in 1e-2f64..1e2, n in 1e-2f64..1e2) {
        let x = theta(a, m, n).unwrap();
        let y = theta(a, n, m).unwrap();
        prop_assert!(((x - y) / x).abs() < 1e-12);
    }
}

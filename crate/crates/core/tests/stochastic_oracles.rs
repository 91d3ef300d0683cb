//! Expected-update formulas against deterministic quadrature over the diffusivity and
//! against Monte Carlo sampling.

mod common;

use common::*;
use dirode_core::quadrature::{exp_integral_ei, integrate_adaptive, CompositeRule};
use dirode_core::stochastic::{
    deterministic_update_p0, deterministic_update_pk, expected_update_p0, expected_update_pk, monte_carlo_expectation,
    UniformDiffusion,
};
use dirode_core::NeighborPolynomial;

fn quadrature_mean(f: impl Fn(f64) -> f64, dist: &UniformDiffusion<f64>) -> f64 {
    CompositeRule::new(dist.lower(), dist.upper(), 64, 20).integrate(f) / dist.width()
}

#[test]
fn p0_matches_quadrature_example() {
    let dist = UniformDiffusion::new(0.1, 0.9).unwrap();
    let got = expected_update_p0(0.0, 2.0, 1.0, &dist, 1.0).unwrap();
    let want = quadrature_mean(|d| deterministic_update_p0(0.0, 2.0, 1.0, d, 1.0), &dist);
    assert!((got - want).abs() < 1e-10, "{got} vs {want}");
}

#[test]
fn p0_matches_quadrature_on_random_sets() {
    let mut r = rng(41);
    for _ in 0..100 {
        let lo = uniform(&mut r, 0.01, 1.0);
        let dist = UniformDiffusion::new(lo, lo + uniform(&mut r, 0.01, 2.0)).unwrap();
        let (u, a0) = (uniform(&mut r, -2.0, 2.0), uniform(&mut r, -4.0, 4.0));
        let abar = uniform(&mut r, 0.5, 1e4);
        let dt = uniform(&mut r, 0.01, 3.0) / abar;
        let got = expected_update_p0(u, a0, abar, &dist, dt).unwrap();
        let want = quadrature_mean(|d| deterministic_update_p0(u, a0, abar, d, dt), &dist);
        assert!((got - want).abs() <= 1e-8 * want.abs().max(1.0), "{got} vs {want}");
    }
}

#[test]
fn pk_matches_quadrature_with_source_and_slopes() {
    let mut r = rng(43);
    for order in 0..=4 {
        for _ in 0..100 {
            let lo = uniform(&mut r, 0.05, 1.0);
            let dist = UniformDiffusion::new(lo, lo + uniform(&mut r, 0.05, 1.5)).unwrap();
            let abar = uniform(&mut r, 0.5, 100.0);
            let dt = uniform(&mut r, 0.05, 2.0) / abar;
            let coeffs: Vec<f64> = (0..=order)
                .map(|p| uniform(&mut r, -2.0, 2.0) / dt.powi(p as i32))
                .collect();
            let poly = NeighborPolynomial::new(coeffs).unwrap();
            let s = uniform(&mut r, -1.0, 1.0);
            let u = uniform(&mut r, -1.0, 1.0);
            let got = expected_update_pk(u, &poly, s, abar, &dist, dt).unwrap();
            let want = quadrature_mean(|d| deterministic_update_pk(u, &poly, s, abar, d, dt), &dist);
            assert!((got - want).abs() <= 1e-8 * want.abs().max(1.0), "P={order}: {got} vs {want}");
        }
    }
}

#[test]
fn pk_reduces_to_p0_without_source() {
    let mut r = rng(47);
    for _ in 0..50 {
        let dist = UniformDiffusion::new(0.2, uniform(&mut r, 0.3, 2.0)).unwrap();
        let (u, a0, abar, dt) = (uniform(&mut r, -1.0, 1.0), uniform(&mut r, -2.0, 2.0), 40.0, uniform(&mut r, 0.001, 0.1));
        let a = expected_update_p0(u, a0, abar, &dist, dt).unwrap();
        let b = expected_update_pk(u, &NeighborPolynomial::constant(a0), 0.0, abar, &dist, dt).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn narrow_and_degenerate_distributions() {
    let (u, a0, abar, dt) = (0.3, 1.7, 25.0, 0.02);
    let l = 0.4;
    let narrow = UniformDiffusion::new(l, l * (1.0 + 1e-9)).unwrap();
    let got = expected_update_p0(u, a0, abar, &narrow, dt).unwrap();
    let want = deterministic_update_p0(u, a0, abar, narrow.midpoint(), dt);
    assert!(rel(got, want) < 1e-6);
    let deg = UniformDiffusion::degenerate(l).unwrap();
    assert_eq!(expected_update_p0(u, a0, abar, &deg, dt).unwrap(), deterministic_update_p0(u, a0, abar, l, dt));
    let poly = NeighborPolynomial::new(vec![1.0, 2.0]).unwrap();
    assert_eq!(
        expected_update_pk(u, &poly, 0.5, abar, &deg, dt).unwrap(),
        deterministic_update_pk(u, &poly, 0.5, abar, l, dt)
    );
    assert!(UniformDiffusion::new(0.5, 0.5).is_err());
    assert!(UniformDiffusion::new(0.5, 0.4).is_err());
}

#[test]
fn expectation_lies_between_extreme_updates() {
    let mut r = rng(53);
    for _ in 0..100 {
        let lo = uniform(&mut r, 0.01, 1.0);
        let dist = UniformDiffusion::new(lo, lo + uniform(&mut r, 0.01, 1.0)).unwrap();
        let (u, a0, abar, dt) = (uniform(&mut r, -1.0, 1.0), uniform(&mut r, -2.0, 2.0), uniform(&mut r, 1.0, 100.0), uniform(&mut r, 0.001, 0.5));
        let e = expected_update_p0(u, a0, abar, &dist, dt).unwrap();
        let x = deterministic_update_p0(u, a0, abar, dist.lower(), dt);
        let y = deterministic_update_p0(u, a0, abar, dist.upper(), dt);
        let tol = 1e-14 * x.abs().max(y.abs()).max(1.0);
        assert!(e >= x.min(y) - tol && e <= x.max(y) + tol);
    }
}

#[test]
fn limits_in_dt() {
    let dist = UniformDiffusion::new(0.1, 0.9).unwrap();
    let tiny: f64 = expected_update_p0(0.7, 1.0, 1.0, &dist, 1e-12).unwrap();
    assert!((tiny - 0.7).abs() < 1e-10);
    let huge: f64 = expected_update_p0(0.7, 1.0, 1.0, &dist, 1e6).unwrap();
    assert!((huge - 0.5).abs() < 1e-5);
}

#[test]
fn monte_carlo_is_consistent_and_reproducible() {
    let dist = UniformDiffusion::new(0.1, 0.9).unwrap();
    let (u, a0, abar, dt) = (0.2, 1.6, 10.0, 0.05);
    let formula = expected_update_p0(u, a0, abar, &dist, dt).unwrap();
    let upd = move |d: f64| deterministic_update_p0(u, a0, abar, d, dt);
    let mut within = 0;
    for seed in 0..100 {
        let (mean, se) = monte_carlo_expectation(&upd, &dist, 10_000, seed).unwrap();
        if (mean - formula).abs() < 4.0 * se {
            within += 1;
        }
    }
    assert!(within >= 99, "{within}/100 trials within 4 standard errors");
    let (m1, s1) = monte_carlo_expectation(&upd, &dist, 100_000, 9).unwrap();
    let (m2, _) = monte_carlo_expectation(&upd, &dist, 100_000, 9).unwrap();
    assert_eq!(m1.to_bits(), m2.to_bits());
    assert!((m1 - formula).abs() < 3.0 * s1);
    let deg = UniformDiffusion::degenerate(0.3).unwrap();
    assert_eq!(monte_carlo_expectation(&upd, &deg, 10, 1).unwrap(), (upd(0.3), 0.0));
    assert!(monte_carlo_expectation(&upd, &dist, 1, 1).is_err());
}

#[test]
fn exponential_integral_matches_quadrature() {
    for x in [-0.01, -0.5, -1.0, -3.0, -12.0, -45.0] {
        // Ei(x) = -int_{-x}^inf e^{-t}/t dt, truncated where the tail is below 1e-30
        let q = -integrate_adaptive(|t| (-t).exp() / t, -x, -x + 80.0, 1e-30, 1e-13).unwrap();
        let e = exp_integral_ei(x);
        assert!(rel(e, q) < 1e-10, "Ei({x}) = {e} vs {q}");
    }
    for x in [0.3, 2.0, 10.0] {
        // Ei(x) = Ei(-0.5) + int_{-0.5}^{x} e^t/t dt across the pole by symmetric pairing
        let pv = integrate_adaptive(|t| (t.exp() - (-t).exp()) / t, 1e-300, 0.5, 1e-15, 1e-13).unwrap()
            + integrate_adaptive(|t| t.exp() / t, 0.5, x, 1e-15, 1e-13).unwrap();
        let want = exp_integral_ei(-0.5) + pv;
        assert!(rel(exp_integral_ei(x), want) < 1e-10, "Ei({x})");
    }
}

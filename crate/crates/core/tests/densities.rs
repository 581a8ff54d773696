//! Extreme-eigenvalue densities: normalisation and consistency with the
//! distribution functions they differentiate.

mod common;

use common::{bulk, draws, model, quantiles, variants};
use rmt_gaps::quadrature::{integrate, QuadOptions};
use rmt_gaps::{DensityMethod, EnsembleSpec, Family};

#[test]
fn densities_integrate_to_one() {
    let opts = QuadOptions::with_tol(1e-9, 1e-12);
    for v in variants() {
        let m = model(&v.spec);
        let (lo, hi) = m.domain();
        let fmin = |x: f64| if x <= lo || x >= hi { 0.0 } else { m.pdf_min(x).unwrap().value };
        let fmax = |x: f64| if x <= lo || x >= hi { 0.0 } else { m.pdf_max(x).unwrap().value };
        for (name, f) in [("pdf_min", &fmin as &dyn Fn(f64) -> f64), ("pdf_max", &fmax)] {
            let total = integrate(f, lo, hi, &opts).unwrap().value;
            assert!((total - 1.0).abs() <= 1e-6, "{} {name}: ∫ = {total}", v.name);
        }
    }
}

#[test]
fn joint_density_integrates_to_one() {
    let m = model(&EnsembleSpec::uncorrelated(Family::LaguerreWishart, 2));
    let opts = QuadOptions::with_tol(1e-8, 1e-12);
    let inner = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        integrate(|s| if s <= r { 0.0 } else { m.joint_extreme_pdf(r, s).unwrap().value }, r, f64::INFINITY, &opts)
            .unwrap()
            .value
    };
    let total = integrate(inner, 0.0, f64::INFINITY, &opts).unwrap().value;
    assert!((total - 1.0).abs() <= 1e-4, "∫∫ p_SL = {total}");
    assert_eq!(m.joint_extreme_pdf(2.0, 1.0).unwrap().value, 0.0);
}

#[test]
fn joint_density_matches_closed_form() {
    // n = 2, α = 0: P(λ1, λ2) = ½ (λ1 − λ2)² e^{−λ1−λ2}, and p_SL at r < s is
    // twice that (two orderings).
    let m = model(&EnsembleSpec::uncorrelated(Family::LaguerreWishart, 2));
    for (r, s) in [(0.1, 0.5), (0.3, 2.0), (1.0, 4.5)] {
        let exact = (s - r) * (s - r) * (-r - s as f64).exp();
        let got = m.joint_extreme_pdf(r, s).unwrap().value;
        assert!((got - exact).abs() <= 1e-10 * exact, "p_SL({r}, {s}) = {got}, expected {exact}");
    }
}

#[test]
fn densities_match_finite_differences() {
    for v in variants() {
        let m = model(&v.spec);
        let q = quantiles(&m);
        let checks = [("pdf_min", q.min), ("pdf_max", q.max)];
        for (name, range) in checks {
            for x in draws(range, 20, 41) {
                let (exact, fd) = if name == "pdf_min" {
                    (m.pdf_min(x).unwrap(), m.pdf_min_finite_difference(x).unwrap())
                } else {
                    (m.pdf_max(x).unwrap(), m.pdf_max_finite_difference(x).unwrap())
                };
                assert_eq!(exact.method, DensityMethod::Analytic, "{} {name} fell back at {x}", v.name);
                assert!(
                    (exact.value - fd).abs() <= 1e-5 * exact.value.abs(),
                    "{} {name} at x = {x}: {} vs finite difference {fd}",
                    v.name,
                    exact.value
                );
            }
        }
    }
}

#[test]
fn densities_are_nonnegative() {
    for v in variants() {
        let m = model(&v.spec);
        for x in draws(bulk(&m), 30, 7) {
            assert!(m.pdf_min(x).unwrap().value >= -1e-10, "{}", v.name);
            assert!(m.pdf_max(x).unwrap().value >= -1e-10, "{}", v.name);
        }
    }
}

#[test]
fn laguerre_smallest_eigenvalue_density_is_exponential() {
    let m = model(&EnsembleSpec::uncorrelated(Family::LaguerreWishart, 3));
    for x in [0.05, 0.3, 0.9, 2.0] {
        let exact = 3.0 * (-3.0 * x as f64).exp();
        assert!((m.pdf_min(x).unwrap().value - exact).abs() <= 1e-12 * exact);
    }
}

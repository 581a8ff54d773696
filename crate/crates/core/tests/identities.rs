//! Structural identities that hold exactly for every ensemble.

mod common;

use common::{bulk, draws, interior_points, model, variants, window};
use rmt_gaps::linalg::{det, pfaffian};
use rmt_gaps::quadrature::{integrate, QuadOptions};
use rmt_gaps::{EnsembleSpec, Family, GapQuery, KernelKind, Model};

fn grid(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| a + (b - a) * (i as f64 + 0.5) / k as f64).collect()
}

fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!((a - b).abs() <= tol * (1.0 + b.abs()), "{what}: {a} vs {b} (diff {:e})", (a - b).abs());
}

#[test]
fn reflection_symmetry_of_symmetric_families() {
    for v in variants() {
        if !matches!(v.spec.family, Family::GaussWigner | Family::CauchyLorentzI) {
            continue;
        }
        let m = model(&v.spec);
        let span = if v.spec.family == Family::GaussWigner { 2.5 } else { 4.0 };
        for x in grid(-span, span, 100) {
            assert_close(m.cdf_max(x).unwrap(), m.sf_min(-x).unwrap(), 1e-9, v.name);
        }
        for x in grid(-span, span, 20) {
            assert_close(m.pdf_max(x).unwrap().value, m.pdf_min(-x).unwrap().value, 1e-9, v.name);
        }
    }
}

fn jacobi_mirror(spec: &EnsembleSpec) -> EnsembleSpec {
    let mut out = spec.clone().with_alpha(spec.beta).with_beta(spec.alpha);
    out.sigma = spec.sigma.iter().map(|s| 1.0 / s).collect();
    out
}

#[test]
fn jacobi_reflection_swaps_extremes() {
    for v in variants().into_iter().filter(|v| v.spec.family == Family::JacobiManova) {
        let m = model(&v.spec);
        let r = model(&jacobi_mirror(&v.spec));
        for x in grid(0.0, 1.0, 40) {
            assert_close(m.sf_min(x).unwrap(), r.cdf_max(1.0 - x).unwrap(), 1e-8, v.name);
            assert_close(m.cdf_max(x).unwrap(), r.sf_min(1.0 - x).unwrap(), 1e-8, v.name);
        }
        for x in grid(0.0, 1.0, 10) {
            assert_close(m.pdf_min(x).unwrap().value, r.pdf_max(1.0 - x).unwrap().value, 1e-8, v.name);
            assert_close(m.pdf_max(x).unwrap().value, r.pdf_min(1.0 - x).unwrap().value, 1e-8, v.name);
        }
    }
}

#[test]
fn gap_and_double_gap_kernels_coincide() {
    for v in variants() {
        let m = model(&v.spec);
        let (lo, hi) = m.domain();
        for x in interior_points(&m, 4, 11) {
            let pairs = [
                (m.kernel_matrix(GapQuery::new(lo, x), false), m.kernel_matrix(GapQuery::new(x, hi), true)),
                (m.kernel_matrix(GapQuery::new(x, hi), false), m.kernel_matrix(GapQuery::new(lo, x), true)),
            ];
            for (a, b) in pairs {
                let (a, b) = (a.unwrap().entries, b.unwrap().entries);
                let scale = a.amax().max(b.amax());
                assert!((&a - &b).amax() <= 1e-12 * scale, "{}: kernel identity fails at x = {x}", v.name);
            }
        }
    }
}

#[test]
fn pfaffian_squares_to_determinant() {
    for v in variants() {
        let m = model(&v.spec);
        if m.kind() != KernelKind::TypeII {
            continue;
        }
        let mut checked = 0;
        let range = bulk(&m);
        for (i, x) in draws(range, 6, 5).into_iter().enumerate() {
            for y in draws(range, 2, 100 + i as u64) {
                let q = GapQuery::new(x.min(y), x.max(y));
                for tilde in [false, true] {
                    let k = m.kernel_matrix(q, tilde).unwrap().entries;
                    let pf = pfaffian(&k).unwrap();
                    let d = det(&k).unwrap();
                    // Both sides carry absolute roundoff of order eps times the
                    // Hadamard bound, so tiny probabilities get that floor.
                    let hadamard: f64 = (0..k.nrows()).map(|i| k.row(i).norm()).product();
                    let tol = 1e-8 * d.abs() + 1e-12 * hadamard;
                    assert!((pf * pf - d).abs() <= tol, "{}: Pf² {} det {}", v.name, pf * pf, d);
                    checked += 1;
                }
            }
        }
        let full = m.full_kernel().entries;
        let pf = pfaffian(&full).unwrap();
        assert_close(pf * pf, det(&full).unwrap(), 1e-8, v.name);
        assert_eq!(checked, 24);
    }
}

#[test]
fn endpoint_values() {
    for v in variants() {
        let m = model(&v.spec);
        let (lo, hi) = m.domain();
        assert_eq!(m.sf_min(lo).unwrap(), 1.0, "{}", v.name);
        assert_eq!(m.cdf_max(hi).unwrap(), 1.0, "{}", v.name);
        assert!(m.cdf_max(lo).unwrap().abs() < 1e-12, "{}", v.name);
        assert!(m.sf_min(hi).unwrap().abs() < 1e-12, "{}", v.name);
        assert_eq!(m.double_gap_probability(GapQuery::new(lo, hi)).unwrap(), 1.0);
        assert_eq!(m.gap_probability(GapQuery::new(0.5, 0.5)).unwrap(), 1.0);
    }
}

#[test]
fn distribution_functions_are_monotone() {
    for v in variants() {
        let m = model(&v.spec);
        let (a, b) = window(&m);
        let xs = grid(a, b.min(if m.domain().1.is_finite() { b } else { 15.0 }), 200);
        let sf: Vec<f64> = xs.iter().map(|&x| m.sf_min(x).unwrap()).collect();
        let cdf: Vec<f64> = xs.iter().map(|&x| m.cdf_max(x).unwrap()).collect();
        for w in sf.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{}: sf_min rises", v.name);
        }
        for w in cdf.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "{}: cdf_max falls", v.name);
        }
    }
}

#[test]
fn probabilities_stay_in_unit_interval() {
    use rand::{Rng, SeedableRng};
    for v in variants() {
        let m = model(&v.spec);
        // Type II kernels cost a 2D quadrature each, hence the smaller draw.
        let count = if m.kind() == KernelKind::TypeI { 1000 } else { 200 };
        let (lo, hi) = m.domain();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let pts = interior_points(&m, 64, 17);
        for _ in 0..count {
            let pick = |rng: &mut rand_chacha::ChaCha8Rng| match rng.random_range(0..10) {
                0 => lo,
                1 => hi,
                _ => pts[rng.random_range(0..pts.len())] * rng.random_range(0.8..1.2),
            };
            let (x, y) = (pick(&mut rng), pick(&mut rng));
            let q = GapQuery::new(x.min(y).clamp(lo, hi), x.max(y).clamp(lo, hi));
            for p in [m.gap_probability(q).unwrap(), m.double_gap_probability(q).unwrap()] {
                assert!((-1e-8..=1.0 + 1e-8).contains(&p), "{}: {p} at {q:?}", v.name);
            }
        }
    }
}

/// The one-eigenvalue density written out by hand for each variant.
fn single_density(spec: &EnsembleSpec) -> impl Fn(f64) -> f64 {
    let s = spec.sigma.first().copied().unwrap_or(1.0);
    let (a, b, k) = (spec.alpha, spec.beta, spec.kappa);
    let family = spec.family;
    move |x: f64| match family {
        Family::GaussWigner => (-(x / s).powi(2)).exp(),
        Family::LaguerreWishart | Family::BuresHall => x.powf(a) * (-x / s).exp(),
        Family::CauchyLorentzI => (1.0 + (x / s).powi(2)).powf(-k),
        Family::CauchyLorentzII => x.powf(a) * (1.0 + x / s).powf(-k),
        Family::JacobiManova => x.powf(a) * (1.0 - x).powf(b) * (1.0 + (1.0 / s - 1.0) * x).powf(-k),
    }
}

fn single(spec: &EnsembleSpec) -> EnsembleSpec {
    let mut out = spec.clone();
    out.n = 1;
    out.sigma.truncate(1);
    if out.family == Family::JacobiManova && out.correlated {
        out.kappa = 2.7;
    }
    if out.family == Family::CauchyLorentzI {
        out.kappa = 1.3;
    }
    out
}

#[test]
fn one_eigenvalue_reduces_to_plain_quadrature() {
    let opts = QuadOptions::with_tol(1e-12, 1e-15);
    for v in variants() {
        let spec = single(&v.spec);
        let m: Model = model(&spec);
        let w = single_density(&spec);
        let (lo, hi) = m.domain();
        let total = integrate(&w, lo, hi, &opts).unwrap().value;
        let range = bulk(&m);
        for x in draws(range, 5, 23) {
            for y in draws(range, 2, 29) {
                let (r, s) = (x.min(y), x.max(y));
                let inside = integrate(&w, r, s, &opts).unwrap().value / total;
                let e = m.gap_probability(GapQuery::new(r, s)).unwrap();
                assert_close(e, 1.0 - inside, 1e-9, v.name);
                let et = m.double_gap_probability(GapQuery::new(r, s)).unwrap();
                assert_close(et, inside, 1e-9, v.name);
            }
        }
    }
}

//! Shared fixtures: one parameter set for each of the twelve variants.
#![allow(dead_code)]

use rmt_gaps::{build, EnsembleSpec, Family, Model};

pub struct Variant {
    pub name: &'static str,
    pub spec: EnsembleSpec,
}

fn corr(family: Family, sigma: &[f64]) -> EnsembleSpec {
    EnsembleSpec::correlated(family, sigma.to_vec())
}

/// Twelve variants at n = 3 so that every odd-n border path is exercised.
pub fn variants() -> Vec<Variant> {
    use Family::*;
    vec![
        Variant { name: "gw-uncorr", spec: EnsembleSpec::uncorrelated(GaussWigner, 3) },
        Variant { name: "gw-corr", spec: corr(GaussWigner, &[3.0 / 4.0, 4.0 / 9.0, 1.0 / 4.0]) },
        Variant { name: "lw-uncorr", spec: EnsembleSpec::uncorrelated(LaguerreWishart, 3).with_alpha(1.5) },
        Variant { name: "lw-corr", spec: corr(LaguerreWishart, &[2.0, 3.0 / 5.0, 7.0 / 3.0]).with_alpha(0.7) },
        Variant { name: "cl1-uncorr", spec: EnsembleSpec::uncorrelated(CauchyLorentzI, 3).with_kappa(4.0) },
        Variant { name: "cl1-corr", spec: corr(CauchyLorentzI, &[1.0 / 2.0, 5.0 / 6.0, 7.0 / 4.0]).with_kappa(3.5) },
        Variant { name: "cl2-uncorr", spec: EnsembleSpec::uncorrelated(CauchyLorentzII, 3).with_alpha(0.5).with_kappa(9.0) },
        Variant {
            name: "cl2-corr",
            spec: corr(CauchyLorentzII, &[1.0 / 2.0, 2.0 / 3.0, 7.0 / 6.0]).with_alpha(1.0).with_kappa(9.0),
        },
        Variant { name: "jacobi-uncorr", spec: EnsembleSpec::uncorrelated(JacobiManova, 3).with_alpha(1.5).with_beta(2.0) },
        Variant {
            name: "jacobi-corr",
            spec: corr(JacobiManova, &[3.0 / 2.0, 5.0 / 6.0, 7.0 / 4.0]).with_alpha(-0.2).with_beta(1.0).with_kappa(2.5),
        },
        Variant { name: "bures-uncorr", spec: EnsembleSpec::uncorrelated(BuresHall, 3).with_alpha(0.5) },
        Variant { name: "bures-corr", spec: corr(BuresHall, &[3.0 / 7.0, 8.0 / 9.0, 7.0 / 11.0]).with_alpha(-0.3) },
    ]
}

pub fn model(spec: &EnsembleSpec) -> Model {
    build(spec).unwrap_or_else(|e| panic!("build failed for {spec:?}: {e}"))
}

/// A bounded interior window that carries essentially all of the mass.
pub fn window(m: &Model) -> (f64, f64) {
    let (lo, hi) = m.domain();
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => (lo, hi),
        (true, false) => (lo, 40.0),
        _ => (-8.0, 8.0),
    }
}

/// Central 98% window of the extreme-eigenvalue laws: from the 1% quantile
/// of the smallest eigenvalue to the 99% quantile of the largest.
pub fn bulk(m: &Model) -> (f64, f64) {
    quantiles(m).into_span()
}

pub fn quantiles(m: &Model) -> Quantiles {
    let (lo, hi) = m.domain();
    let bracket = |f: &dyn Fn(f64) -> f64, target: f64| {
        let (mut a, mut b) = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => (lo, hi),
            (true, false) => (lo, 1.0),
            _ => (-1.0, 1.0),
        };
        while !hi.is_finite() && f(b) < target {
            b *= 2.0;
        }
        while !lo.is_finite() && f(a) > target {
            a *= 2.0;
        }
        for _ in 0..20 {
            let c = 0.5 * (a + b);
            if f(c) < target {
                a = c;
            } else {
                b = c;
            }
        }
        0.5 * (a + b)
    };
    let cdf_min = |x: f64| 1.0 - m.sf_min(x).unwrap();
    let cdf_max = |x: f64| m.cdf_max(x).unwrap();
    Quantiles {
        min: (bracket(&cdf_min, 0.01), bracket(&cdf_min, 0.99)),
        max: (bracket(&cdf_max, 0.01), bracket(&cdf_max, 0.99)),
    }
}

/// 1% and 99% quantiles of the smallest and of the largest eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct Quantiles {
    pub min: (f64, f64),
    pub max: (f64, f64),
}

impl Quantiles {
    fn into_span(self) -> (f64, f64) {
        (self.min.0, self.max.1)
    }
}

/// `count` uniform draws from `range`.
pub fn draws(range: (f64, f64), count: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random_range(range.0..range.1)).collect()
}

/// Interior sample points spread across the bulk of the distribution.
pub fn interior_points(m: &Model, count: usize, seed: u64) -> Vec<f64> {
    draws(bulk(m), count, seed)
}

//! Closed-form products for the partition function C⁻¹, used as build-time
//! checks on the determinant and Pfaffian evaluations.

use super::{EnsembleSpec, Family};
use crate::specfun::{ln_barnes_g, ln_gamma};
use std::f64::consts::PI;

fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// ln ∏_{j>k} φ(σ_j, σ_k), or None when some factor is not positive.
fn ln_pair_product(sigma: &[f64], phi: impl Fn(f64, f64) -> f64) -> Option<f64> {
    let mut acc = 0.0;
    for j in 0..sigma.len() {
        for k in 0..j {
            let v = phi(sigma[j], sigma[k]);
            if !(v > 0.0) {
                return None;
            }
            acc += v.ln();
        }
    }
    Some(acc)
}

/// C⁻¹ from a closed product when one is known for these parameters.
///
/// Expects a validated spec (σ ascending).
pub fn closed_partition(spec: &EnsembleSpec) -> Option<f64> {
    ln_closed_partition(spec).map(f64::exp).filter(|v| v.is_finite() && *v > 0.0)
}

fn ln_closed_partition(spec: &EnsembleSpec) -> Option<f64> {
    let n = spec.n;
    let nf = n as f64;
    let s = &spec.sigma;
    let (a, b, k) = (spec.alpha, spec.beta, spec.kappa);
    let js = || (1..=n).map(|j| j as f64);
    let ln_sigma_sum = |p: f64| s.iter().map(|v| p * v.ln()).sum::<f64>();
    match (spec.family, spec.correlated) {
        (Family::GaussWigner, false) => {
            Some(0.5 * nf * PI.ln() + ln_barnes_g(n as u32 + 2).ok()? - 0.5 * nf * (nf - 1.0) * 2f64.ln())
        }
        (Family::GaussWigner, true) => Some(
            ln_factorial(n)
                + 0.5 * nf * PI.ln()
                + ln_sigma_sum(1.0)
                + ln_pair_product(s, |x, y| (x * x - y * y) / (x * x + y * y))?,
        ),
        (Family::LaguerreWishart, false) => Some(js().map(|j| ln_gamma(j + 1.0) + ln_gamma(j + a)).sum()),
        (Family::LaguerreWishart, true) => Some(
            ln_factorial(n)
                + ln_pair_product(s, |x, y| x - y)?
                + ln_sigma_sum(a + 1.0)
                + js().map(|j| ln_gamma(j + a)).sum::<f64>(),
        ),
        (Family::CauchyLorentzI, false) => Some(
            (nf * nf - 2.0 * k * nf + nf) * 2f64.ln()
                + nf * PI.ln()
                + js()
                    .map(|j| ln_gamma(j + 1.0) + ln_gamma(j + 2.0 * k - 2.0 * nf) - 2.0 * ln_gamma(j + k - nf))
                    .sum::<f64>(),
        ),
        (Family::CauchyLorentzI, true) if k == nf => Some(
            ln_factorial(n) + nf * PI.ln() + ln_sigma_sum(1.0) + ln_pair_product(s, |x, y| (x - y) / (x + y))?,
        ),
        (Family::CauchyLorentzII, false) => Some(
            ln_factorial(n)
                + js()
                    .map(|j| ln_gamma(j) + ln_gamma(j + a) + ln_gamma(k - a - nf - j + 1.0) - ln_gamma(k - j + 1.0))
                    .sum::<f64>(),
        ),
        (Family::CauchyLorentzII, true) => Some(
            ln_factorial(n)
                + ln_pair_product(s, |x, y| x - y)?
                + ln_sigma_sum(a + 1.0)
                + js()
                    .map(|j| ln_gamma(j + a) + ln_gamma(k - a - nf + 1.0 - j) - ln_gamma(k - nf + 1.0))
                    .sum::<f64>(),
        ),
        (Family::JacobiManova, false) => Some(
            js().map(|j| ln_gamma(j + 1.0) + ln_gamma(j + a) + ln_gamma(j + b) - ln_gamma(j + a + b + nf)).sum(),
        ),
        (Family::BuresHall, true) if a == -0.5 => Some(
            ln_factorial(n)
                + 0.5 * nf * PI.ln()
                + ln_sigma_sum(0.5)
                + ln_pair_product(s, |x, y| (x.sqrt() - y.sqrt()) / (x.sqrt() + y.sqrt()))?,
        ),
        (Family::BuresHall, false) => Some(bures_uncorrelated_ln_product(n, a)),
        _ => None,
    }
}

/// ln of π^{n/2} 2^{−n²−2αn} ∏ Γ(j+1) Γ(j+2α+1) / Γ(j+α+½); this product
/// already equals n!·Pf h, so no separate n! factor is applied.
pub(crate) fn bures_uncorrelated_ln_product(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    0.5 * nf * PI.ln() - (nf * nf + 2.0 * alpha * nf) * 2f64.ln()
        + (1..=n)
            .map(|j| {
                let j = j as f64;
                ln_gamma(j + 1.0) + ln_gamma(j + 2.0 * alpha + 1.0) - ln_gamma(j + alpha + 0.5)
            })
            .sum::<f64>()
}

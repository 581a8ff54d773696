//! Determinant (Type I) kernels.
//!
//! Every kernel exposes the partial integrals ∫_𝕝^x and ∫_x^𝕦 of
//! w f_j g_k in closed form, each evaluated on the side where it does not
//! come from subtracting two nearly equal numbers.

use crate::engine::TypeIKernel;
use crate::linalg::SquareMatrix;
use crate::specfun::{
    appell_f1, beta, beta_inc, beta_inc_negarg, beta_tail_negarg, gamma, gamma_pair, hyp2f1, Result,
};

type Split = (SquareMatrix, SquareMatrix);

/// Fills (lower, upper) for a kernel whose entries depend only on
/// p = j + k − 1 (1-based), from `entry(p) = (lower, upper)`.
fn hankel(n: usize, mut entry: impl FnMut(usize) -> Result<(f64, f64)>) -> Result<Split> {
    let vals: Vec<(f64, f64)> = (1..2 * n).map(&mut entry).collect::<Result<_>>()?;
    let lo = SquareMatrix::from_fn(n, n, |j, k| vals[j + k].0);
    let up = SquareMatrix::from_fn(n, n, |j, k| vals[j + k].1);
    Ok((lo, up))
}

fn hankel_total(n: usize, entry: impl Fn(usize) -> f64) -> SquareMatrix {
    let vals: Vec<f64> = (1..2 * n).map(entry).collect();
    SquareMatrix::from_fn(n, n, |j, k| vals[j + k])
}

/// Fills (lower, upper) entry by entry from `entry(j, k)` (0-based).
fn general(n: usize, mut entry: impl FnMut(usize, usize) -> Result<(f64, f64)>) -> Result<Split> {
    let mut lo = SquareMatrix::zeros(n, n);
    let mut up = SquareMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let (a, b) = entry(j, k)?;
            lo[(j, k)] = a;
            up[(j, k)] = b;
        }
    }
    Ok((lo, up))
}

/// Partial integrals of t^(p−1) w(t) over the real line for an even w,
/// assembled from half-line pieces. `half(y)` returns (∫_0^y, ∫_y^∞) and
/// `half_total` is ∫_0^∞.
fn symmetric_split(p: usize, x: f64, half_total: f64, half: impl Fn(f64) -> Result<(f64, f64)>) -> Result<(f64, f64)> {
    let even_integrand = p % 2 == 1;
    if x > 0.0 {
        let (h, t) = half(x)?;
        let lower = if even_integrand { half_total + h } else { -t };
        Ok((lower, t))
    } else {
        let (h, t) = half(-x)?;
        let (lower, upper) = if even_integrand { (t, half_total + h) } else { (-t, t) };
        Ok((lower, upper))
    }
}

fn powers(x: f64, f: &mut [f64]) {
    let mut v = 1.0;
    for slot in f.iter_mut() {
        *slot = v;
        v *= x;
    }
}

// ---------------------------------------------------------------------------

/// Uncorrelated Gaussian unitary ensemble, w = e^(−λ²).
pub struct Gue {
    n: usize,
}

impl Gue {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl TypeIKernel for Gue {
    fn n(&self) -> usize {
        self.n
    }
    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
    fn weight(&self, x: f64) -> f64 {
        (-x * x).exp()
    }
    fn fg(&self, x: f64, f: &mut [f64], g: &mut [f64]) {
        powers(x, f);
        g.copy_from_slice(f);
    }
    fn total(&self) -> Result<SquareMatrix> {
        Ok(hankel_total(self.n, |p| if p % 2 == 1 { gamma(p as f64 / 2.0) } else { 0.0 }))
    }
    fn split(&self, x: f64) -> Result<Split> {
        hankel(self.n, |p| {
            let a = p as f64 / 2.0;
            symmetric_split(p, x, 0.5 * gamma(a), |y| {
                let (lo, up) = gamma_pair(a, y * y)?;
                Ok((0.5 * lo, 0.5 * up))
            })
        })
    }
}

/// Uncorrelated Laguerre unitary ensemble, w = λ^α e^(−λ).
pub struct Lue {
    n: usize,
    alpha: f64,
}

impl Lue {
    pub fn new(n: usize, alpha: f64) -> Self {
        Self { n, alpha }
    }
}

impl TypeIKernel for Lue {
    fn n(&self) -> usize {
        self.n
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
    fn weight(&self, x: f64) -> f64 {
        x.powf(self.alpha) * (-x).exp()
    }
    fn fg(&self, x: f64, f: &mut [f64], g: &mut [f64]) {
        powers(x, f);
        g.copy_from_slice(f);
    }
    fn total(&self) -> Result<SquareMatrix> {
        Ok(hankel_total(self.n, |p| gamma(p as f64 + self.alpha)))
    }
    fn split(&self, x: f64) -> Result<Split> {
        hankel(self.n, |p| gamma_pair(p as f64 + self.alpha, x))
    }
}

/// Correlated Laguerre–Wishart, w = λ^α, g_k = e^(−λ/σ_k).
pub struct LaguerreCorrelated {
    alpha: f64,
    sigma: Vec<f64>,
}

impl LaguerreCorrelated {
    pub fn new(alpha: f64, sigma: Vec<f64>) -> Self {
        Self { alpha, sigma }
    }
}

impl TypeIKernel for LaguerreCorrelated {
    fn n(&self) -> usize {
        self.sigma.len()
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
    fn weight(&self, x: f64) -> f64 {
        x.powf(self.alpha)
    }
    fn fg(&self, x: f64, f: &mut [f64], g: &mut [f64]) {
        powers(x, f);
        for (slot, s) in g.iter_mut().zip(&self.sigma) {
            *slot = (-x / s).exp();
        }
    }
    fn total(&self) -> Result<SquareMatrix> {
        let n = self.n();
        Ok(SquareMatrix::from_fn(n, n, |j, k| {
            let a = (j + 1) as f64 + self.alpha;
            self.sigma[k].powf(a) * gamma(a)
        }))
    }
    fn split(&self, x: f64) -> Result<Split> {
        general(self.n(), |j, k| {
            let a = (j + 1) as f64 + self.alpha;
            let s = self.sigma[k];
            let (lo, up) = gamma_pair(a, x / s)?;
            let m = s.powf(a);
            Ok((m * lo, m * up))
        })
    }
}

/// Uncorrelated Cauchy–Lorentz I, w = (1+λ²)^(−κ).
pub struct ClIUncorrelated {
    n: usize,
    kappa: f64,
}

impl ClIUncorrelated {
    pub fn new(n: usize, kappa: f64) -> Self {
        Self { n, kappa }
    }
}

impl TypeIKernel for ClIUncorrelated {
    fn n(&self) -> usize {
        self.n
    }
    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
    fn weight(&self, x: f64) -> f64 {
        (1.0 + x * x).powf(-self.kappa)
    }
    fn fg(&self, x: f64, f: &mut [f64], g: &mut [f64]) {
        powers(x, f);
        g.copy_from_slice(f);
    }
    fn total(&self) -> Result<SquareMatrix> {
        let k = self.kappa;
        Ok(hankel_total(self.n, |p| {
            let a = p as f64 / 2.0;
            if p % 2 == 1 {
                beta(a, k - a)
            } else {
                0.0
            }
        }))
    }
    fn split(&self, x: f64) -> Result<Split> {
        let k = self.kappa;
        hankel(self.n, |p| {
            let a = p as f64 / 2.0;
            // ∫_0^y t^(p−1)(1+t²)^(−κ) dt = ½ ∫_0^(y²) u^(a−1)(1+u)^(−κ) du.
            symmetric_split(p, x, 0.5 * beta(a, k - a), |y| {
                let u = y * y;
                Ok((0.5 * beta_inc_negarg(u, a, 1.0 - k)?, 0.5 * beta_tail_negarg(u, a, 1.0 - k)?))
            })
        })
    }
}

/// Uncorrelated Cauchy–Lorentz II, w = λ^α (1+λ)^(−κ).
pub struct ClIIUncorrelated {
    n: usize,
    alpha: f64,
    kappa: f64,
}

impl ClIIUncorrelated {
    pub fn new(n: usize, alpha: f64, kappa: f64) -> Self {
        Self { n, alpha, kappa }
    }
}

impl TypeIKernel for ClIIUncorrelated {
    fn n(&self) -> usize {
        self.n
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
    fn weight(&self, x: f64) -> f64 {
        x.powf(self.alpha) * (1.0 + x).powf(-self.kappa)
    }
    fn fg(&self, x: f64, f: &mut [f64], g: &mut [f64]) {
        powers(x, f);
        g.copy_from_slice(f);
    }
    fn total(&self) -> Result<SquareMatrix> {
        Ok(hankel_total(self.n, |p| {
            let a = p as f64 + self.alpha;
            beta(a, self.kappa - a)
        }))
    }
    fn split(&self, x: f64) -> Result<Split> {
        let b = 1.0 - self.kappa;
        hankel(self.n, |p| {
            let a = p as f64 + self.alpha;
            Ok((beta_inc_negarg(x, a, b)?, beta_tail_negarg(x, a, b)?))
        })
    }
}

/// Correlated Cauchy–Lorentz II, w = λ^α, g_k = (1+λ/σ_k)^(−(κ−n+1)).
pub struct ClIICorrelated {
    alpha: f64,
    kappa: f64,
    sigma: Vec<f64>,
}

impl ClIICorrelated {
    pub fn new(alpha: f64, kappa: f64, sigma: Vec<f64>) -> Self {
        Self { alpha, kappa, sigma }
    }

    fn exponent(&self) -> f64 {
        self.kappa - self.sigma.len() as f64 + 1.0
    }

    fn entry_total(&self, j: usize, k: usize) -> f64 {
        let n = self.sigma.len() as f64;
        let a = (j + 1) as f64 + self.alpha;
        self.sigma[k].powf(a) * beta(a, self.kappa - n + 1.0 - a)
    }

    fn entry_split(&self, j: usize, k: usize, x: f64) -> Result<(f64, f64)> {
        let n = self.sigma.len() as f64;
        let a = (j + 1) as f64 + self.alpha;
        let b = n - self.kappa;
        let s = self.sigma[k];
        let m = s.powf(a);
        let u = x / s;
        Ok((m * beta_inc_negarg(u, a, b)?, m * beta_tail_negarg(u, a, b)?))
    }
}

impl TypeIKernel for ClIICorrelated {
    fn n(&self) -> usize {
        self.sigma.len()
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
    fn weight(&self, x: f64) -> f64 {
        x.powf(self.alpha)
    }
    fn fg(&self, x: f64, f: &mut [f64], g: &mut [f64]) {
        powers(x, f);
        let c = self.exponent();
        for (slot, s) in g.iter_mut().zip(&self.sigma) {
            *slot = (1.0 + x / s).powf(-c);
        }
    }
    fn total(&self) -> Result<SquareMatrix> {
        let n = self.n();
        Ok(SquareMatrix::from_fn(n, n, |j, k| self.entry_total(j, k)))
    }
    fn split(&self, x: f64) -> Result<Split> {
        general(self.n(), |j, k| self.entry_split(j, k, x))
    }
}

/// Uncorrelated Jacobi–MANOVA, w = λ^α (1−λ)^β.
pub struct JacobiUncorrelated {
    n: usize,
    alpha: f64,
    beta: f64,
}

impl JacobiUncorrelated {
    pub fn new(n: usize, alpha: f64, beta: f64) -> Self {
        Self { n, alpha, beta }
    }
}

impl TypeIKernel for JacobiUncorrelated {
    fn n(&self) -> usize {
        self.n
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
    fn weight(&self, x: f64) -> f64 {
        x.powf(self.alpha) * (1.0 - x).powf(self.beta)
    }
    fn fg(&self, x: f64, f: &mut [f64], g: &mut [f64]) {
        powers(x, f);
        g.copy_from_slice(f);
    }
    fn total(&self) -> Result<SquareMatrix> {
        Ok(hankel_total(self.n, |p| beta(p as f64 + self.alpha, self.beta + 1.0)))
    }
    fn split(&self, x: f64) -> Result<Split> {
        let b = self.beta + 1.0;
        hankel(self.n, |p| {
            let a = p as f64 + self.alpha;
            Ok((beta_inc(x, a, b)?, beta_inc(1.0 - x, b, a)?))
        })
    }
}

/// Correlated Jacobi–MANOVA for any κ through Appell F₁ kernels:
/// w = λ^α (1−λ)^β, f_j = λ^(j−1), g_k = (1+(σ_k⁻¹−1)λ)^(−(κ−n+1)).
pub struct JacobiAppell {
    alpha: f64,
    beta: f64,
    c: f64,
    sigma: Vec<f64>,
    total: SquareMatrix,
}

impl JacobiAppell {
    pub fn new(alpha: f64, beta: f64, kappa: f64, sigma: Vec<f64>) -> Self {
        let n = sigma.len();
        let mut me = Self { alpha, beta, c: kappa - n as f64 + 1.0, sigma, total: SquareMatrix::zeros(n, n) };
        me.total = SquareMatrix::from_fn(n, n, |j, k| me.entry_total(j, k));
        me
    }

    fn entry_total(&self, j: usize, k: usize) -> f64 {
        let a = (j + 1) as f64 + self.alpha;
        let s = self.sigma[k];
        match hyp2f1(a, self.c, a + self.beta + 1.0, 1.0 - 1.0 / s) {
            Ok(f) if f.is_finite() => beta(a, self.beta + 1.0) * f,
            _ => match (self.lower(j, k, 0.5), self.upper(j, k, 0.5)) {
                (Ok(l), Ok(u)) => l + u,
                _ => f64::NAN,
            },
        }
    }

    /// ∫_0^x t^(a−1)(1−t)^β (1+(σ⁻¹−1)t)^(−c) dt.
    fn lower(&self, j: usize, k: usize, x: f64) -> Result<f64> {
        let a = (j + 1) as f64 + self.alpha;
        let y = (1.0 - 1.0 / self.sigma[k]) * x;
        Ok(x.powf(a) / a * appell_f1(a, -self.beta, self.c, a + 1.0, x, y)?)
    }

    /// ∫_x^1 of the same integrand, via t = 1 − u.
    fn upper(&self, j: usize, k: usize, x: f64) -> Result<f64> {
        let a = (j + 1) as f64 + self.alpha;
        let b1 = self.beta + 1.0;
        let s = self.sigma[k];
        let u = 1.0 - x;
        Ok(s.powf(self.c) * u.powf(b1) / b1 * appell_f1(b1, 1.0 - a, self.c, b1 + 1.0, u, (1.0 - s) * u)?)
    }
}

impl TypeIKernel for JacobiAppell {
    fn n(&self) -> usize {
        self.sigma.len()
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
    fn weight(&self, x: f64) -> f64 {
        x.powf(self.alpha) * (1.0 - x).powf(self.beta)
    }
    fn fg(&self, x: f64, f: &mut [f64], g: &mut [f64]) {
        powers(x, f);
        for (slot, s) in g.iter_mut().zip(&self.sigma) {
            *slot = (1.0 + (1.0 / s - 1.0) * x).powf(-self.c);
        }
    }
    fn total(&self) -> Result<SquareMatrix> {
        Ok(self.total.clone())
    }
    fn split(&self, x: f64) -> Result<Split> {
        general(self.n(), |j, k| {
            let t = self.total[(j, k)];
            if x <= 0.5 {
                let l = self.lower(j, k, x)?;
                Ok((l, t - l))
            } else {
                let u = self.upper(j, k, x)?;
                Ok((t - u, u))
            }
        })
    }
}

/// Correlated Jacobi–MANOVA with β = κ − α − 2n, evaluated through the map
/// μ = λ/(1−λ) onto correlated Cauchy–Lorentz II. The pointwise functions
/// are chosen so that w f_j g_k is the pulled-back CL-II integrand:
/// w = λ^α (1−λ)^β, f_j = λ^(j−1)(1−λ)^(n−j), g_k as in the Appell route.
pub struct JacobiCauchyMap {
    alpha: f64,
    beta: f64,
    c: f64,
    sigma: Vec<f64>,
    inner: ClIICorrelated,
}

impl JacobiCauchyMap {
    pub fn new(alpha: f64, beta: f64, kappa: f64, sigma: Vec<f64>) -> Self {
        let n = sigma.len() as f64;
        Self { alpha, beta, c: kappa - n + 1.0, inner: ClIICorrelated::new(alpha, kappa, sigma.clone()), sigma }
    }
}

impl TypeIKernel for JacobiCauchyMap {
    fn n(&self) -> usize {
        self.sigma.len()
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
    fn weight(&self, x: f64) -> f64 {
        x.powf(self.alpha) * (1.0 - x).powf(self.beta)
    }
    fn fg(&self, x: f64, f: &mut [f64], g: &mut [f64]) {
        let n = f.len();
        let mut v = 1.0;
        for (j, slot) in f.iter_mut().enumerate() {
            *slot = v * (1.0 - x).powi((n - 1 - j) as i32);
            v *= x;
        }
        for (slot, s) in g.iter_mut().zip(&self.sigma) {
            *slot = (1.0 + (1.0 / s - 1.0) * x).powf(-self.c);
        }
    }
    fn total(&self) -> Result<SquareMatrix> {
        self.inner.total()
    }
    fn split(&self, x: f64) -> Result<Split> {
        self.inner.split(x / (1.0 - x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadOptions};

    fn check_split<K: TypeIKernel>(k: &K, xs: &[f64], tol: f64) {
        let n = k.n();
        let (lo, hi) = k.domain();
        let total = k.total().unwrap();
        let opts = QuadOptions::with_tol(1e-12, 1e-15);
        for &x in xs {
            let (l, u) = k.split(x).unwrap();
            for j in 0..n {
                for c in 0..n {
                    let integrand = |t: f64| k.density(t)[(j, c)];
                    let ql = integrate(integrand, lo, x, &opts).unwrap().value;
                    let qu = integrate(integrand, x, hi, &opts).unwrap().value;
                    let scale = total[(j, c)].abs().max(ql.abs() + qu.abs());
                    assert!((l[(j, c)] - ql).abs() <= tol * scale, "lower ({j},{c}) at {x}: {} vs {ql}", l[(j, c)]);
                    assert!((u[(j, c)] - qu).abs() <= tol * scale, "upper ({j},{c}) at {x}: {} vs {qu}", u[(j, c)]);
                    assert!((l[(j, c)] + u[(j, c)] - total[(j, c)]).abs() <= tol * scale);
                }
            }
        }
    }

    #[test]
    fn gue_split_matches_quadrature() {
        check_split(&Gue::new(4), &[-1.3, -0.2, 0.0, 0.4, 2.0], 1e-10);
    }

    #[test]
    fn lue_and_laguerre_correlated_split() {
        check_split(&Lue::new(3, 1.5), &[0.3, 2.0, 7.5], 1e-10);
        check_split(&LaguerreCorrelated::new(0.5, vec![0.6, 2.0, 7.0 / 3.0]), &[0.3, 2.0, 7.5], 1e-10);
    }

    #[test]
    fn cauchy_splits() {
        check_split(&ClIUncorrelated::new(3, 3.4), &[-4.0, -0.3, 0.5, 6.0], 1e-9);
        check_split(&ClIIUncorrelated::new(3, 0.5, 9.0), &[0.2, 1.0, 4.0], 1e-9);
        check_split(&ClIICorrelated::new(1.0, 8.0, vec![0.5, 2.0 / 3.0, 7.0 / 6.0]), &[0.2, 1.0, 4.0], 1e-9);
    }

    #[test]
    fn jacobi_splits() {
        check_split(&JacobiUncorrelated::new(3, -0.4, 3.5), &[0.1, 0.5, 0.85], 1e-9);
        check_split(&JacobiAppell::new(1.3, 1.4, 1.5, vec![0.4, 1.5, 5.0 / 6.0]), &[0.1, 0.5, 0.85], 1e-9);
        check_split(&JacobiAppell::new(2.2, 4.5, 0.0, vec![0.4, 5.0 / 6.0, 1.5, 1.75, 4.0]), &[0.2, 0.7], 1e-9);
    }
}

//! Pfaffian (Type II) kernels. All four share the two-point function
//! f(λ, μ) = (μ − λ)/(μ + λ) that comes from the ratio Δ/Δ₊.

use crate::engine::TypeIIKernel;
use crate::linalg::SquareMatrix;
use crate::specfun::{beta, beta_inc_negarg, beta_tail_negarg, erfc, gamma, gamma_pair, hyp2f1, Result};
use std::f64::consts::PI;

fn schur_pair(lambda: f64, mu: f64) -> f64 {
    (mu - lambda) / (mu + lambda)
}

/// Embeds an n×n antisymmetric block and an optional border column into
/// the N×N matrix used by the engine.
fn bordered(n: usize, block: impl Fn(usize, usize) -> f64, border: impl Fn(usize) -> f64) -> SquareMatrix {
    let dim = if n % 2 == 0 { n } else { n + 1 };
    let mut m = SquareMatrix::zeros(dim, dim);
    for j in 0..n {
        for k in j + 1..n {
            let v = block(j, k);
            m[(j, k)] = v;
            m[(k, j)] = -v;
        }
    }
    if dim > n {
        for j in 0..n {
            let v = border(j);
            m[(j, n)] = v;
            m[(n, j)] = -v;
        }
    }
    m
}

/// Splits of ∫ w g over the real line for an even integrand, from the
/// half-line pieces (∫_0^y, ∫_y^∞) and the half total.
fn even_split(x: f64, half_total: f64, half: impl Fn(f64) -> Result<(f64, f64)>) -> Result<(f64, f64)> {
    let (h, t) = half(x.abs())?;
    if x > 0.0 {
        Ok((half_total + h, t))
    } else {
        Ok((t, half_total + h))
    }
}

/// Correlated Gauss–Wigner: w = 1, g_k = e^(−λ²/σ_k²).
pub struct GaussWignerCorrelated {
    sigma: Vec<f64>,
}

impl GaussWignerCorrelated {
    pub fn new(sigma: Vec<f64>) -> Self {
        Self { sigma }
    }
}

impl TypeIIKernel for GaussWignerCorrelated {
    fn n(&self) -> usize {
        self.sigma.len()
    }
    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
    fn weight(&self, _x: f64) -> f64 {
        1.0
    }
    fn pair(&self, lambda: f64, mu: f64) -> f64 {
        schur_pair(lambda, mu)
    }
    fn funcs(&self, x: f64, out: &mut [f64]) {
        for (slot, s) in out.iter_mut().zip(&self.sigma) {
            let t = x / s;
            *slot = (-t * t).exp();
        }
    }
    fn border_split(&self, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let c = 0.5 * PI.sqrt();
        Ok(self.sigma.iter().map(|s| (c * s * erfc(-x / s), c * s * erfc(x / s))).unzip())
    }
    fn total(&self) -> Result<SquareMatrix> {
        let s = &self.sigma;
        Ok(bordered(
            s.len(),
            |j, k| {
                let (a, b) = (s[j] * s[j], s[k] * s[k]);
                PI * s[j] * s[k] * (b - a) / (b + a)
            },
            |j| PI.sqrt() * s[j],
        ))
    }
}

/// Correlated Cauchy–Lorentz I: w = 1, g_k = (1+λ²/σ_k²)^(−c), c = κ−n+1.
pub struct ClICorrelated {
    c: f64,
    sigma: Vec<f64>,
}

impl ClICorrelated {
    pub fn new(kappa: f64, sigma: Vec<f64>) -> Self {
        let n = sigma.len() as f64;
        Self { c: kappa - n + 1.0, sigma }
    }

    fn border_total(&self, s: f64) -> f64 {
        s * beta(0.5, self.c - 0.5)
    }

    /// ∫∫_{μ>λ} over the plane, closed form through ₂F₁.
    fn block(&self, sj: f64, sk: f64) -> Result<f64> {
        let c = self.c;
        let pref = PI * (gamma(c - 0.5) / gamma(c)).powi(2) / 2.0;
        let term = |x: f64, y: f64| -> Result<f64> {
            Ok(x.powf(2.0 * c) * y.powf(-2.0 * (c - 1.0)) * hyp2f1(2.0 * c - 1.0, c + 0.5, 2.0 * c, 1.0 - (x * x) / (y * y))?)
        };
        Ok(pref * (term(sj, sk)? - term(sk, sj)?))
    }
}

impl TypeIIKernel for ClICorrelated {
    fn n(&self) -> usize {
        self.sigma.len()
    }
    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
    fn weight(&self, _x: f64) -> f64 {
        1.0
    }
    fn pair(&self, lambda: f64, mu: f64) -> f64 {
        schur_pair(lambda, mu)
    }
    fn funcs(&self, x: f64, out: &mut [f64]) {
        for (slot, s) in out.iter_mut().zip(&self.sigma) {
            let t = x / s;
            *slot = (1.0 + t * t).powf(-self.c);
        }
    }
    fn border_split(&self, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let b = 1.0 - self.c;
        let mut lo = Vec::with_capacity(self.sigma.len());
        let mut up = Vec::with_capacity(self.sigma.len());
        for &s in &self.sigma {
            // ∫_0^y (1+t²/σ²)^(−c) dt = (σ/2) ∫_0^(y²/σ²) v^(−½)(1+v)^(−c) dv.
            let (l, u) = even_split(x, 0.5 * self.border_total(s), |y| {
                let v = (y / s) * (y / s);
                Ok((0.5 * s * beta_inc_negarg(v, 0.5, b)?, 0.5 * s * beta_tail_negarg(v, 0.5, b)?))
            })?;
            lo.push(l);
            up.push(u);
        }
        Ok((lo, up))
    }
    fn total(&self) -> Result<SquareMatrix> {
        let s = &self.sigma;
        let n = s.len();
        let mut block = SquareMatrix::zeros(n, n);
        for j in 0..n {
            for k in j + 1..n {
                block[(j, k)] = self.block(s[j], s[k])?;
            }
        }
        Ok(bordered(n, |j, k| block[(j, k)], |j| self.border_total(s[j])))
    }
}

/// Correlated Bures–Hall: w = λ^α, g_k = e^(−λ/σ_k).
pub struct BuresCorrelated {
    alpha: f64,
    sigma: Vec<f64>,
}

impl BuresCorrelated {
    pub fn new(alpha: f64, sigma: Vec<f64>) -> Self {
        Self { alpha, sigma }
    }

    fn block(&self, sj: f64, sk: f64) -> Result<f64> {
        let a = self.alpha;
        let pref = gamma(a + 1.0).powi(2) / 2.0;
        let term = |x: f64, y: f64| -> Result<f64> {
            Ok(x.powf(2.0 * a + 2.0) * hyp2f1(2.0 * a + 2.0, a + 2.0, 2.0 * a + 3.0, 1.0 - x / y)?)
        };
        Ok(pref * (term(sj, sk)? - term(sk, sj)?))
    }
}

impl TypeIIKernel for BuresCorrelated {
    fn n(&self) -> usize {
        self.sigma.len()
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
    fn weight(&self, x: f64) -> f64 {
        x.powf(self.alpha)
    }
    fn pair(&self, lambda: f64, mu: f64) -> f64 {
        schur_pair(lambda, mu)
    }
    fn funcs(&self, x: f64, out: &mut [f64]) {
        for (slot, s) in out.iter_mut().zip(&self.sigma) {
            *slot = (-x / s).exp();
        }
    }
    fn border_split(&self, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let a = self.alpha + 1.0;
        let mut lo = Vec::with_capacity(self.sigma.len());
        let mut up = Vec::with_capacity(self.sigma.len());
        for &s in &self.sigma {
            let (l, u) = gamma_pair(a, x / s)?;
            let m = s.powf(a);
            lo.push(m * l);
            up.push(m * u);
        }
        Ok((lo, up))
    }
    fn total(&self) -> Result<SquareMatrix> {
        let s = &self.sigma;
        let n = s.len();
        let mut block = SquareMatrix::zeros(n, n);
        for j in 0..n {
            for k in j + 1..n {
                block[(j, k)] = self.block(s[j], s[k])?;
            }
        }
        let a = self.alpha + 1.0;
        Ok(bordered(n, |j, k| block[(j, k)], |j| s[j].powf(a) * gamma(a)))
    }
}

/// Uncorrelated Bures–Hall: w = λ^α e^(−λ), g_j = λ^(j−1).
pub struct BuresUncorrelated {
    n: usize,
    alpha: f64,
}

impl BuresUncorrelated {
    pub fn new(n: usize, alpha: f64) -> Self {
        Self { n, alpha }
    }
}

impl TypeIIKernel for BuresUncorrelated {
    fn n(&self) -> usize {
        self.n
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
    fn weight(&self, x: f64) -> f64 {
        x.powf(self.alpha) * (-x).exp()
    }
    fn pair(&self, lambda: f64, mu: f64) -> f64 {
        schur_pair(lambda, mu)
    }
    fn funcs(&self, x: f64, out: &mut [f64]) {
        let mut v = 1.0;
        for slot in out.iter_mut() {
            *slot = v;
            v *= x;
        }
    }
    fn border_split(&self, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        (1..=self.n).map(|j| gamma_pair(j as f64 + self.alpha, x)).collect::<Result<Vec<_>>>().map(|v| v.into_iter().unzip())
    }
    fn total(&self) -> Result<SquareMatrix> {
        let a = self.alpha;
        let g: Vec<f64> = (1..=self.n).map(|j| gamma(j as f64 + a)).collect();
        Ok(bordered(
            self.n,
            |j, k| {
                let (jf, kf) = ((j + 1) as f64, (k + 1) as f64);
                (kf - jf) / (jf + kf + 2.0 * a) * g[j] * g[k]
            },
            |j| g[j],
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, AntisymBatch, QuadOptions};

    /// Full-domain kernel by direct 2D quadrature.
    fn numeric_total<K: TypeIIKernel>(k: &K) -> SquareMatrix {
        let n = k.n();
        let (lo, hi) = k.domain();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j + 1..n).map(move |c| (j, c))).collect();
        let weight = |x: f64| k.weight(x);
        let kernel = |a: f64, b: f64| k.pair(a, b);
        let funcs = |x: f64, o: &mut [f64]| k.funcs(x, o);
        let ones = vec![1.0; n];
        let domain = [(lo, hi)];
        let batch = AntisymBatch {
            domain: &domain,
            weight: &weight,
            kernel: &kernel,
            funcs: &funcs,
            nfuncs: n,
            pairs: &pairs,
            scale: &ones,
        };
        let res = batch.integrate(&QuadOptions::with_tol(1e-11, 1e-14)).unwrap();
        let mut block = SquareMatrix::zeros(n, n);
        for (v, &(j, c)) in res.values.iter().zip(&pairs) {
            block[(j, c)] = *v;
        }
        let opts = QuadOptions::with_tol(1e-12, 1e-15);
        bordered(
            n,
            |j, c| block[(j, c)],
            |j| {
                integrate(
                    |x| {
                        let mut g = vec![0.0; n];
                        k.funcs(x, &mut g);
                        k.weight(x) * g[j]
                    },
                    lo,
                    hi,
                    &opts,
                )
                .unwrap()
                .value
            },
        )
    }

    fn assert_close(a: &SquareMatrix, b: &SquareMatrix, tol: f64) {
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() <= tol * y.abs().max(1e-300), "{x} vs {y}\n{a}\n{b}");
        }
    }

    #[test]
    fn closed_totals_match_quadrature() {
        let gw = GaussWignerCorrelated::new(vec![0.25, 2.0 / 7.0, 4.0 / 9.0]);
        assert_close(&gw.total().unwrap(), &numeric_total(&gw), 1e-8);
        let cl = ClICorrelated::new(3.4, vec![1.0 / 7.0, 2.0 / 9.0, 3.0 / 8.0]);
        assert_close(&cl.total().unwrap(), &numeric_total(&cl), 1e-8);
        let cl = ClICorrelated::new(3.0, vec![5.0 / 6.0, 7.0 / 8.0]);
        assert_close(&cl.total().unwrap(), &numeric_total(&cl), 1e-8);
        let bc = BuresCorrelated::new(-0.5, vec![0.4, 3.0 / 7.0, 8.0 / 9.0]);
        assert_close(&bc.total().unwrap(), &numeric_total(&bc), 1e-8);
        let bc = BuresCorrelated::new(2.3, vec![0.4, 3.0 / 7.0, 7.0 / 11.0, 8.0 / 9.0, 3.0]);
        assert_close(&bc.total().unwrap(), &numeric_total(&bc), 1e-8);
        let bu = BuresUncorrelated::new(3, 1.7);
        assert_close(&bu.total().unwrap(), &numeric_total(&bu), 1e-8);
    }

    #[test]
    fn border_splits_add_up() {
        let cl = ClICorrelated::new(3.4, vec![1.0 / 7.0, 2.0 / 9.0, 3.0 / 8.0]);
        let total = cl.total().unwrap();
        for x in [-2.0, -0.1, 0.0, 0.3, 5.0] {
            let (l, u) = cl.border_split(x).unwrap();
            for j in 0..3 {
                let lq = integrate(|t| (1.0 + (t / cl.sigma[j]).powi(2)).powf(-cl.c), f64::NEG_INFINITY, x, &QuadOptions::default())
                    .unwrap()
                    .value;
                assert!((l[j] - lq).abs() < 1e-9 * total[(j, 3)]);
                assert!((l[j] + u[j] - total[(j, 3)]).abs() < 1e-12 * total[(j, 3)]);
            }
        }
    }
}

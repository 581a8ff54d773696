//! Generic evaluation of gap probabilities and extreme-eigenvalue densities
//! for determinant (Type I) and Pfaffian (Type II) ensembles.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensembles::{EnsembleSpec, SpecError};
use crate::linalg::{det, pfaffian, pfaffian_derivative, LinalgError, SquareMatrix};
use crate::par::{try_map_slice, Execution};
use crate::quadrature::{integrate_union_vec, AntisymBatch, QuadError, QuadOptions};
use crate::specfun::SpecialError;

/// Values further than this outside [0, 1] are reported as errors.
const RANGE_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("invalid query: {0}")]
    Query(String),
    #[error("kernel evaluation failed at (r, s) = ({r}, {s}): {detail}")]
    Kernel { r: f64, s: f64, detail: String },
    #[error("{quantity} = {value} lies outside [0, 1]")]
    OutOfRange { quantity: &'static str, value: f64 },
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, EngineError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    TypeI,
    TypeII,
}

/// A gap (r, s) with r ≤ s inside the model domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapQuery {
    pub r: f64,
    pub s: f64,
}

impl GapQuery {
    pub fn new(r: f64, s: f64) -> Self {
        Self { r, s }
    }
}

/// The n×n (Type I) or N×N antisymmetric (Type II) kernel for one query,
/// in the row-scaled units used for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub kind: KernelKind,
    pub dim: usize,
    pub entries: SquareMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityMethod {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityValue {
    pub value: f64,
    pub method: DensityMethod,
}

/// Scalar quantities that can be evaluated on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    SfMin,
    CdfMax,
    PdfMin,
    PdfMax,
}

/// Determinant ensembles: P ∝ ∏ w(λ) · det[f_j(λ_k)] · det[g_j(λ_k)].
pub trait TypeIKernel: Send + Sync {
    fn n(&self) -> usize;
    fn domain(&self) -> (f64, f64);
    fn weight(&self, x: f64) -> f64;
    fn fg(&self, x: f64, f: &mut [f64], g: &mut [f64]);
    /// Full-domain matrix h_jk = ∫ w f_j g_k.
    fn total(&self) -> std::result::Result<SquareMatrix, SpecialError>;
    /// (∫_𝕝^x, ∫_x^𝕦) of w f_j g_k for an interior x, each computed without
    /// subtracting from the total where that would cancel.
    fn split(&self, x: f64) -> std::result::Result<(SquareMatrix, SquareMatrix), SpecialError>;
    /// w(x) f_j(x) g_k(x).
    fn density(&self, x: f64) -> SquareMatrix {
        let n = self.n();
        let mut f = vec![0.0; n];
        let mut g = vec![0.0; n];
        self.fg(x, &mut f, &mut g);
        let w = self.weight(x);
        SquareMatrix::from_fn(n, n, |j, k| w * f[j] * g[k])
    }
}

/// Pfaffian ensembles: P ∝ ∏ w(λ) · Pf[f(λ_j, λ_k)] · det[g_j(λ_k)].
pub trait TypeIIKernel: Send + Sync {
    fn n(&self) -> usize;
    fn domain(&self) -> (f64, f64);
    fn weight(&self, x: f64) -> f64;
    /// The antisymmetric two-point function f(λ, μ).
    fn pair(&self, lambda: f64, mu: f64) -> f64;
    fn funcs(&self, x: f64, out: &mut [f64]);
    /// (∫_𝕝^x, ∫_x^𝕦) of w g_j for an interior x.
    fn border_split(&self, x: f64) -> std::result::Result<(Vec<f64>, Vec<f64>), SpecialError>;
    /// Full-domain N×N matrix, border included for odd n.
    fn total(&self) -> std::result::Result<SquareMatrix, SpecialError>;
}

pub enum Kernel {
    TypeI(Box<dyn TypeIKernel>),
    TypeII(Box<dyn TypeIIKernel>),
}

/// Closed-form shortcuts that bypass the kernel machinery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FastPath {
    None,
    /// sf_min(x) = exp(−rate·(x − 𝕝)).
    ExponentialSf { rate: f64 },
}

/// A compiled ensemble: immutable after build and safe to share.
pub struct Model {
    spec: EnsembleSpec,
    kernel: Kernel,
    domain: (f64, f64),
    n: usize,
    dim: usize,
    scale: Vec<f64>,
    h_raw: SquareMatrix,
    h_scaled: SquareMatrix,
    h_ref: f64,
    partition: f64,
    fast: FastPath,
    quad: QuadOptions,
}

impl std::fmt::Debug for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Model")
            .field("spec", &self.spec)
            .field("kind", &self.kind())
            .field("partition", &self.partition)
            .finish()
    }
}

fn spec_err(e: SpecialError) -> EngineError {
    EngineError::Kernel { r: f64::NAN, s: f64::NAN, detail: e.to_string() }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

impl Model {
    /// Assembles a model from a kernel, checking the partition function
    /// against `closed_partition` when one is known.
    pub fn new(spec: EnsembleSpec, kernel: Kernel, closed_partition: Option<f64>, fast: FastPath) -> Result<Self> {
        let (n, domain, h) = match &kernel {
            Kernel::TypeI(k) => (k.n(), k.domain(), k.total().map_err(spec_err)?),
            Kernel::TypeII(k) => (k.n(), k.domain(), k.total().map_err(spec_err)?),
        };
        let dim = h.nrows();
        if h.iter().any(|v| !v.is_finite()) {
            return Err(SpecError::Numerical("full-domain kernel is not finite".into()).into());
        }
        let row_max: Vec<f64> = (0..dim).map(|j| h.row(j).amax()).collect();
        if row_max.iter().any(|&m| m == 0.0) {
            return Err(SpecError::Numerical("full-domain kernel has a zero row".into()).into());
        }
        let (scale, h_scaled, h_ref, log_partition) = match kernel {
            Kernel::TypeI(_) => {
                let scale: Vec<f64> = row_max.iter().map(|m| 1.0 / m).collect();
                let hs = SquareMatrix::from_fn(dim, dim, |j, k| h[(j, k)] * scale[j]);
                let d = det(&hs)?;
                let logp = ln_factorial(n) + d.abs().ln() - scale.iter().map(|s| s.ln()).sum::<f64>();
                (scale, hs, d, logp)
            }
            Kernel::TypeII(_) => {
                let scale: Vec<f64> = row_max.iter().map(|m| 1.0 / m.sqrt()).collect();
                let hs = SquareMatrix::from_fn(dim, dim, |j, k| h[(j, k)] * scale[j] * scale[k]);
                let p = pfaffian(&hs)?;
                let logp = ln_factorial(n) + p.abs().ln() - scale.iter().map(|s| s.ln()).sum::<f64>();
                (scale, hs, p, logp)
            }
        };
        if !(h_ref > 0.0) || !log_partition.is_finite() {
            return Err(SpecError::NonPositivePartition(h_ref).into());
        }
        let partition = log_partition.exp();
        if let Some(closed) = closed_partition {
            let rel = (partition - closed).abs() / closed.abs();
            if !(rel <= 1e-6) {
                return Err(SpecError::PartitionMismatch { computed: partition, closed }.into());
            }
        }
        Ok(Self {
            spec,
            kernel,
            domain,
            n,
            dim,
            scale,
            h_raw: h,
            h_scaled,
            h_ref,
            partition,
            fast,
            quad: QuadOptions { rel_tol: 1e-11, abs_tol: 1e-13, max_subdivisions: 4000 },
        })
    }

    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn kind(&self) -> KernelKind {
        match self.kernel {
            Kernel::TypeI(_) => KernelKind::TypeI,
            Kernel::TypeII(_) => KernelKind::TypeII,
        }
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn fast_path(&self) -> FastPath {
        self.fast
    }

    /// The normalisation C⁻¹.
    pub fn partition(&self) -> f64 {
        self.partition
    }

    /// Full-domain kernel in evaluation units.
    pub fn full_kernel(&self) -> KernelMatrix {
        KernelMatrix { kind: self.kind(), dim: self.dim, entries: self.h_scaled.clone() }
    }

    /// Overrides the 2D quadrature tolerances used for Type II kernels.
    pub fn with_quadrature(mut self, quad: QuadOptions) -> Self {
        self.quad = quad;
        self
    }

    fn check_point(&self, x: f64, what: &str) -> Result<()> {
        let (lo, hi) = self.domain;
        if x.is_nan() || x < lo || x > hi {
            return Err(EngineError::Query(format!("{what} = {x} outside the domain [{lo}, {hi}]")));
        }
        Ok(())
    }

    fn check_query(&self, q: GapQuery) -> Result<()> {
        self.check_point(q.r, "r")?;
        self.check_point(q.s, "s")?;
        if q.r > q.s {
            return Err(EngineError::Query(format!("r ≤ s violated (r = {}, s = {})", q.r, q.s)));
        }
        Ok(())
    }

    fn in_range(quantity: &'static str, v: f64) -> Result<f64> {
        if !(v >= -RANGE_SLACK && v <= 1.0 + RANGE_SLACK) {
            return Err(EngineError::OutOfRange { quantity, value: v });
        }
        Ok(v)
    }

    fn kerr(&self, r: f64, s: f64) -> impl Fn(SpecialError) -> EngineError {
        move |e| EngineError::Kernel { r, s, detail: e.to_string() }
    }

    // ---- Type I ------------------------------------------------------

    /// (lower, upper) at x including the domain ends.
    fn type1_split(&self, k: &dyn TypeIKernel, x: f64, r: f64, s: f64) -> Result<(SquareMatrix, SquareMatrix)> {
        let (lo, hi) = self.domain;
        let h = self.h_raw.clone();
        if x <= lo {
            return Ok((SquareMatrix::zeros(self.dim, self.dim), h));
        }
        if x >= hi {
            return Ok((h, SquareMatrix::zeros(self.dim, self.dim)));
        }
        k.split(x).map_err(self.kerr(r, s))
    }

    fn scale_rows(&self, mut m: SquareMatrix) -> SquareMatrix {
        for j in 0..self.dim {
            let sj = self.scale[j];
            m.row_mut(j).scale_mut(sj);
        }
        m
    }

    fn type1_chi(&self, k: &dyn TypeIKernel, q: GapQuery, tilde: bool) -> Result<SquareMatrix> {
        let (lo, hi) = self.domain;
        let (r, s) = (q.r, q.s);
        let m = if !tilde {
            let (lr, _) = self.type1_split(k, r, r, s)?;
            let (_, us) = self.type1_split(k, s, r, s)?;
            lr + us
        } else if s >= hi {
            self.type1_split(k, r, r, s)?.1
        } else if r <= lo {
            self.type1_split(k, s, r, s)?.0
        } else {
            let (lr, ur) = self.type1_split(k, r, r, s)?;
            let (ls, us) = self.type1_split(k, s, r, s)?;
            // Subtract whichever pair of partial integrals is smaller.
            SquareMatrix::from_fn(self.dim, self.dim, |j, c| {
                if ur[(j, c)].abs() <= ls[(j, c)].abs() {
                    ur[(j, c)] - us[(j, c)]
                } else {
                    ls[(j, c)] - lr[(j, c)]
                }
            })
        };
        Ok(self.scale_rows(m))
    }

    fn type1_rho(&self, k: &dyn TypeIKernel, x: f64) -> SquareMatrix {
        self.scale_rows(k.density(x))
    }

    // ---- Type II -----------------------------------------------------

    fn pieces(a: f64, b: f64, c: f64, d: f64) -> Vec<(f64, f64)> {
        [(a, b), (c, d)].into_iter().filter(|p| p.0 < p.1).collect()
    }

    fn type2_border(&self, k: &dyn TypeIIKernel, x: f64, r: f64, s: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let (lo, hi) = self.domain;
        let total: Vec<f64> = (0..self.n).map(|j| self.h_raw[(j, self.n)]).collect();
        if x <= lo {
            return Ok((vec![0.0; self.n], total));
        }
        if x >= hi {
            return Ok((total, vec![0.0; self.n]));
        }
        k.border_split(x).map_err(self.kerr(r, s))
    }

    fn type2_chi(&self, k: &dyn TypeIIKernel, q: GapQuery, tilde: bool) -> Result<SquareMatrix> {
        let (lo, hi) = self.domain;
        let (r, s) = (q.r, q.s);
        let n = self.n;
        let domain = if tilde { Self::pieces(r, s, r, r) } else { Self::pieces(lo, r, s, hi) };
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j + 1..n).map(move |c| (j, c))).collect();
        let mut m = SquareMatrix::zeros(self.dim, self.dim);
        if !domain.is_empty() && !pairs.is_empty() {
            let weight = |x: f64| k.weight(x);
            let kernel = |a: f64, b: f64| k.pair(a, b);
            let funcs = |x: f64, o: &mut [f64]| k.funcs(x, o);
            let batch = AntisymBatch {
                domain: &domain,
                weight: &weight,
                kernel: &kernel,
                funcs: &funcs,
                nfuncs: n,
                pairs: &pairs,
                scale: &self.scale[..n],
            };
            let res = batch.integrate(&self.quad).map_err(|e| quad_err(e, r, s))?;
            for (v, &(j, c)) in res.values.iter().zip(&pairs) {
                m[(j, c)] = *v;
                m[(c, j)] = -*v;
            }
        }
        if self.dim > n {
            let border: Vec<f64> = if !tilde {
                let (lr, _) = self.type2_border(k, r, r, s)?;
                let (_, us) = self.type2_border(k, s, r, s)?;
                lr.iter().zip(&us).map(|(a, b)| a + b).collect()
            } else if s >= hi {
                self.type2_border(k, r, r, s)?.1
            } else if r <= lo {
                self.type2_border(k, s, r, s)?.0
            } else {
                let (lr, ur) = self.type2_border(k, r, r, s)?;
                let (ls, us) = self.type2_border(k, s, r, s)?;
                (0..n).map(|j| if ur[j].abs() <= ls[j].abs() { ur[j] - us[j] } else { ls[j] - lr[j] }).collect()
            };
            for j in 0..n {
                let v = border[j] * self.scale[j] * self.scale[n];
                m[(j, n)] = v;
                m[(n, j)] = -v;
            }
        }
        Ok(m)
    }

    /// x-derivative of the Type II kernel over `range` when x is its moving
    /// endpoint; `sign` is −1 when x is the lower end and +1 when the upper.
    fn type2_dchi(&self, k: &dyn TypeIIKernel, x: f64, range: (f64, f64), sign: f64) -> Result<SquareMatrix> {
        let n = self.n;
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j + 1..n).map(move |c| (j, c))).collect();
        let mut gx = vec![0.0; n];
        k.funcs(x, &mut gx);
        let wx = k.weight(x);
        let mut m = SquareMatrix::zeros(self.dim, self.dim);
        if !pairs.is_empty() && range.0 < range.1 {
            let mut gm = vec![0.0; n];
            let mut cuts = vec![range];
            if -x > range.0 && -x < range.1 {
                cuts = vec![(range.0, -x), (-x, range.1)];
            }
            let scale = &self.scale;
            let res = integrate_union_vec(
                |mu, o: &mut [f64]| {
                    let wm = k.weight(mu);
                    if wm == 0.0 {
                        return;
                    }
                    k.funcs(mu, &mut gm);
                    let pref = wx * wm * k.pair(x, mu);
                    for (slot, &(j, c)) in o.iter_mut().zip(&pairs) {
                        *slot = pref * (gx[j] * gm[c] - gx[c] * gm[j]) * scale[j] * scale[c];
                    }
                },
                pairs.len(),
                &cuts,
                &QuadOptions { rel_tol: self.quad.rel_tol * 0.1, abs_tol: self.quad.abs_tol * 0.1, ..self.quad },
            )
            .map_err(|e| quad_err(e, x, x))?;
            for (v, &(j, c)) in res.values.iter().zip(&pairs) {
                m[(j, c)] = sign * v;
                m[(c, j)] = -sign * v;
            }
        }
        if self.dim > n {
            for j in 0..n {
                let v = sign * wx * gx[j] * self.scale[j] * self.scale[n];
                m[(j, n)] = v;
                m[(n, j)] = -v;
            }
        }
        Ok(m)
    }

    fn pf_checked(&self, m: &SquareMatrix) -> Result<f64> {
        let pf = pfaffian(m)?;
        let d = det(m)?;
        let hadamard: f64 = (0..m.nrows()).map(|i| m.row(i).norm()).product();
        if (pf * pf - d).abs() > 1e-8 * d.abs() + 1e-12 * hadamard {
            return Err(EngineError::Consistency(format!("Pf² = {:e} but det = {:e}", pf * pf, d)));
        }
        Ok(pf)
    }

    // ---- public evaluation ---------------------------------------------

    /// The kernel matrix for E (tilde = false) or Ẽ (tilde = true).
    pub fn kernel_matrix(&self, q: GapQuery, tilde: bool) -> Result<KernelMatrix> {
        self.check_query(q)?;
        let entries = match &self.kernel {
            Kernel::TypeI(k) => self.type1_chi(k.as_ref(), q, tilde)?,
            Kernel::TypeII(k) => self.type2_chi(k.as_ref(), q, tilde)?,
        };
        Ok(KernelMatrix { kind: self.kind(), dim: self.dim, entries })
    }

    fn ratio(&self, m: &SquareMatrix) -> Result<f64> {
        match self.kernel {
            Kernel::TypeI(_) => Ok(det(m)? / self.h_ref),
            Kernel::TypeII(_) => Ok(self.pf_checked(m)? / self.h_ref),
        }
    }

    /// Probability that no eigenvalue lies in (r, s).
    pub fn gap_probability(&self, q: GapQuery) -> Result<f64> {
        self.check_query(q)?;
        if q.r == q.s {
            return Ok(1.0);
        }
        let m = self.kernel_matrix(q, false)?;
        Self::in_range("E(r,s)", self.ratio(&m.entries)?)
    }

    /// Probability that every eigenvalue lies in [r, s].
    pub fn double_gap_probability(&self, q: GapQuery) -> Result<f64> {
        self.check_query(q)?;
        if q.r <= self.domain.0 && q.s >= self.domain.1 {
            return Ok(1.0);
        }
        if q.r == q.s {
            return Ok(0.0);
        }
        let m = self.kernel_matrix(q, true)?;
        Self::in_range("Ẽ(r,s)", self.ratio(&m.entries)?)
    }

    /// Survival function of the smallest eigenvalue, E(𝕝, x).
    pub fn sf_min(&self, x: f64) -> Result<f64> {
        self.check_point(x, "x")?;
        if let FastPath::ExponentialSf { rate } = self.fast {
            return Ok((-rate * (x - self.domain.0)).exp());
        }
        self.gap_probability(GapQuery::new(self.domain.0, x))
    }

    /// Distribution function of the largest eigenvalue, E(x, 𝕦).
    pub fn cdf_max(&self, x: f64) -> Result<f64> {
        self.check_point(x, "x")?;
        self.gap_probability(GapQuery::new(x, self.domain.1))
    }

    fn check_interior(&self, x: f64) -> Result<()> {
        self.check_point(x, "x")?;
        if x <= self.domain.0 || x >= self.domain.1 {
            return Err(EngineError::Query(format!("x = {x} must be interior for a density")));
        }
        Ok(())
    }

    fn analytic_pdf(&self, x: f64, smallest: bool) -> Result<f64> {
        let (lo, hi) = self.domain;
        match &self.kernel {
            Kernel::TypeI(k) => {
                let q = if smallest { GapQuery::new(lo, x) } else { GapQuery::new(x, hi) };
                let chi = self.type1_chi(k.as_ref(), q, false)?;
                let rho = self.type1_rho(k.as_ref(), x);
                let mut acc = 0.0;
                for i in 0..self.dim {
                    let mut m = chi.clone();
                    m.set_row(i, &rho.row(i));
                    acc += det(&m)?;
                }
                Ok(acc / self.h_ref)
            }
            Kernel::TypeII(k) => {
                let q = if smallest { GapQuery::new(lo, x) } else { GapQuery::new(x, hi) };
                let chi = self.type2_chi(k.as_ref(), q, false)?;
                self.pf_checked(&chi)?;
                let d = if smallest {
                    self.type2_dchi(k.as_ref(), x, (x, hi), -1.0)?
                } else {
                    self.type2_dchi(k.as_ref(), x, (lo, x), 1.0)?
                };
                let dp = pfaffian_derivative(&chi, &d)?;
                Ok(if smallest { -dp } else { dp } / self.h_ref)
            }
        }
    }

    fn fd_step(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain;
        let h = (1e-4 * x.abs()).max(1e-5);
        h.min(0.25 * (x - lo)).min(0.25 * (hi - x))
    }

    /// Once-Richardson-extrapolated central difference of `f` at x.
    fn richardson<F: Fn(f64) -> Result<f64>>(f: F, x: f64, h: f64) -> Result<f64> {
        let d1 = (f(x + h)? - f(x - h)?) / (2.0 * h);
        let h2 = 0.5 * h;
        let d2 = (f(x + h2)? - f(x - h2)?) / (2.0 * h2);
        Ok((4.0 * d2 - d1) / 3.0)
    }

    /// −d/dx sf_min by finite differences.
    pub fn pdf_min_finite_difference(&self, x: f64) -> Result<f64> {
        self.check_interior(x)?;
        let lo = self.domain.0;
        Ok(-Self::richardson(|t| self.gap_probability(GapQuery::new(lo, t)), x, self.fd_step(x))?)
    }

    /// d/dx cdf_max by finite differences.
    pub fn pdf_max_finite_difference(&self, x: f64) -> Result<f64> {
        self.check_interior(x)?;
        let hi = self.domain.1;
        Self::richardson(|t| self.gap_probability(GapQuery::new(t, hi)), x, self.fd_step(x))
    }

    fn density(&self, x: f64, smallest: bool) -> Result<DensityValue> {
        self.check_interior(x)?;
        match self.analytic_pdf(x, smallest) {
            Ok(v) => Ok(DensityValue { value: v, method: DensityMethod::Analytic }),
            Err(EngineError::Kernel { .. }) | Err(EngineError::Linalg(_)) => {
                let v = if smallest { self.pdf_min_finite_difference(x)? } else { self.pdf_max_finite_difference(x)? };
                Ok(DensityValue { value: v, method: DensityMethod::FiniteDifference })
            }
            Err(e) => Err(e),
        }
    }

    /// Density of the smallest eigenvalue.
    pub fn pdf_min(&self, x: f64) -> Result<DensityValue> {
        self.density(x, true)
    }

    /// Density of the largest eigenvalue.
    pub fn pdf_max(&self, x: f64) -> Result<DensityValue> {
        self.density(x, false)
    }

    /// ∂Ẽ(r, s)/∂s for Type II kernels.
    fn type2_dtilde_ds(&self, k: &dyn TypeIIKernel, r: f64, s: f64) -> Result<f64> {
        let chi = self.type2_chi(k, GapQuery::new(r, s), true)?;
        let d = self.type2_dchi(k, s, (r, s), 1.0)?;
        Ok(pfaffian_derivative(&chi, &d)? / self.h_ref)
    }

    /// Joint density of the smallest and largest eigenvalues at (r, s);
    /// zero when r ≥ s.
    pub fn joint_extreme_pdf(&self, r: f64, s: f64) -> Result<DensityValue> {
        if self.n < 2 {
            return Err(EngineError::Query("joint density needs n ≥ 2".into()));
        }
        self.check_point(r, "r")?;
        self.check_point(s, "s")?;
        if r >= s {
            return Ok(DensityValue { value: 0.0, method: DensityMethod::Analytic });
        }
        self.check_interior(r)?;
        self.check_interior(s)?;
        match &self.kernel {
            Kernel::TypeI(k) => {
                let chi = self.type1_chi(k.as_ref(), GapQuery::new(r, s), true)?;
                let rr = self.type1_rho(k.as_ref(), r);
                let rs = self.type1_rho(k.as_ref(), s);
                let mut acc = 0.0;
                for i in 0..self.dim {
                    for l in 0..self.dim {
                        if i == l {
                            continue;
                        }
                        let mut m = chi.clone();
                        m.set_row(i, &rr.row(i));
                        m.set_row(l, &rs.row(l));
                        acc += det(&m)?;
                    }
                }
                Ok(DensityValue { value: acc / self.h_ref, method: DensityMethod::Analytic })
            }
            Kernel::TypeII(k) => {
                // Analytic in s, central difference in r.
                let h = self.fd_step(r).min(0.25 * (s - r));
                let v = -Self::richardson(|t| self.type2_dtilde_ds(k.as_ref(), t, s), r, h)?;
                Ok(DensityValue { value: v, method: DensityMethod::FiniteDifference })
            }
        }
    }

    /// One quantity at one point.
    pub fn evaluate(&self, quantity: Quantity, x: f64) -> Result<f64> {
        match quantity {
            Quantity::SfMin => self.sf_min(x),
            Quantity::CdfMax => self.cdf_max(x),
            Quantity::PdfMin => self.pdf_min(x).map(|d| d.value),
            Quantity::PdfMax => self.pdf_max(x).map(|d| d.value),
        }
    }

    /// One quantity over a grid of points, in input order.
    pub fn evaluate_grid(&self, quantity: Quantity, xs: &[f64], exec: Execution) -> Result<Vec<f64>> {
        try_map_slice(exec, xs, |&x| self.evaluate(quantity, x))
    }
}

fn quad_err(e: QuadError, r: f64, s: f64) -> EngineError {
    EngineError::Kernel { r, s, detail: format!("quadrature: {e}") }
}

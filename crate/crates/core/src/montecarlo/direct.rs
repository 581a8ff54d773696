//! Explicit matrix models whose eigenvalues follow each family's law.

use rand::Rng;

use super::matrices::{
    cayley_hermitian, generalized_eigenvalues, hermitian_eigenvalues, ln_abs_det_one_plus, random_unitary_step,
    sample_gaussian_hermitian, sample_haar_unitary, sample_wishart, CMatrix,
};
use super::{stream_rng, MonteCarloError, Result, SampleSource, SpectrumSample};
use crate::ensembles::{EnsembleSpec, Family};
use crate::par::{try_map_range, Execution};
use nalgebra::Complex;

const INT_TOL: f64 = 1e-9;
/// Fixed block count for chain-based constructions, so the stream layout
/// does not depend on the thread pool.
const UNITARY_BLOCKS: usize = 64;
const UNITARY_BURN_IN: usize = 2000;
const UNITARY_THIN: usize = 20;
const DOMAIN_RETRIES: usize = 10;

/// A recipe for one draw.
#[derive(Debug, Clone, PartialEq)]
pub enum DirectPlan {
    /// Hermitian Gaussian, diagonal variance d_j²/2 and off-diagonal
    /// part variance d_j² d_k² / (2(d_j² + d_k²)).
    Gaussian { d: Vec<f64> },
    /// Σ^{1/2} G G† Σ^{1/2}, G of size n×m.
    Wishart { n: usize, m: usize, sigma: Vec<f64> },
    /// −i(1 − U)(1 + U)⁻¹ for U ∝ |det(1 + U)|^{2p} dμ(U).
    CayleyUnitary { n: usize, power: usize },
    /// Eigenvalues of W_B⁻¹ W_A (Σ on W_A).
    WishartRatio { n: usize, m_a: usize, m_b: usize, sigma: Vec<f64> },
    /// Eigenvalues of (W_A + W_B)⁻¹ W_A (Σ on W_A).
    Manova { n: usize, m_a: usize, m_b: usize, sigma: Vec<f64> },
    /// ((1 + U)/2) W ((1 + U†)/2) with W of m degrees of freedom and
    /// U ∝ |det(1 + U)|^{2(m−n)} dμ(U).
    BuresUnitary { n: usize, m: usize },
}

fn nonneg_int(x: f64) -> Option<usize> {
    let r = x.round();
    ((x - r).abs() <= INT_TOL && r >= 0.0).then_some(r as usize)
}

fn not_direct(reason: impl Into<String>) -> MonteCarloError {
    MonteCarloError::NotDirectlyConstructible(reason.into())
}

/// Chooses a matrix construction for `spec`, or explains why none applies.
pub fn direct_plan(spec: &EnsembleSpec) -> Result<DirectPlan> {
    let spec = spec.validated()?;
    let n = spec.n;
    let sigma = if spec.correlated { spec.sigma.clone() } else { Vec::new() };
    let alpha_int = || nonneg_int(spec.alpha).ok_or_else(|| not_direct(format!("α = {} is not a nonnegative integer", spec.alpha)));
    match spec.family {
        Family::GaussWigner => {
            let d = if spec.correlated { spec.sigma.clone() } else { vec![1.0; n] };
            Ok(DirectPlan::Gaussian { d })
        }
        Family::LaguerreWishart => Ok(DirectPlan::Wishart { n, m: n + alpha_int()?, sigma }),
        Family::CauchyLorentzI => {
            if spec.correlated {
                return Err(not_direct("correlated Cauchy–Lorentz I has no simple matrix construction"));
            }
            let p = nonneg_int(spec.kappa - n as f64)
                .ok_or_else(|| not_direct(format!("κ − n = {} is not a nonnegative integer", spec.kappa - n as f64)))?;
            Ok(DirectPlan::CayleyUnitary { n, power: p })
        }
        Family::CauchyLorentzII => {
            let a = alpha_int()?;
            let rest = nonneg_int(spec.kappa - (n + a) as f64)
                .filter(|&mb| mb >= n)
                .ok_or_else(|| not_direct(format!("κ − n − α = {} must be an integer ≥ n", spec.kappa - n as f64 - spec.alpha)))?;
            Ok(DirectPlan::WishartRatio { n, m_a: n + a, m_b: rest, sigma })
        }
        Family::JacobiManova => {
            let a = alpha_int()?;
            let b = nonneg_int(spec.beta).ok_or_else(|| not_direct(format!("β = {} is not a nonnegative integer", spec.beta)))?;
            if spec.correlated && (spec.kappa - (a + b + 2 * n) as f64).abs() > INT_TOL {
                return Err(not_direct(format!("correlated construction needs κ = α + β + 2n = {}", a + b + 2 * n)));
            }
            Ok(DirectPlan::Manova { n, m_a: n + a, m_b: n + b, sigma })
        }
        Family::BuresHall => {
            if spec.correlated {
                return Err(not_direct("correlated Bures–Hall needs a correlated Cauchy–Lorentz I factor"));
            }
            let p = nonneg_int(spec.alpha + 0.5)
                .ok_or_else(|| not_direct(format!("α + 1/2 = {} is not a nonnegative integer", spec.alpha + 0.5)))?;
            Ok(DirectPlan::BuresUnitary { n, m: n + p })
        }
    }
}

impl DirectPlan {
    fn n(&self) -> usize {
        match self {
            DirectPlan::Gaussian { d } => d.len(),
            DirectPlan::Wishart { n, .. }
            | DirectPlan::CayleyUnitary { n, .. }
            | DirectPlan::WishartRatio { n, .. }
            | DirectPlan::Manova { n, .. }
            | DirectPlan::BuresUnitary { n, .. } => *n,
        }
    }

    /// Exponent p of the |det(1 + U)|^{2p} weight, when a unitary is needed.
    fn unitary_power(&self) -> Option<usize> {
        match self {
            DirectPlan::CayleyUnitary { power, .. } => Some(*power),
            DirectPlan::BuresUnitary { n, m } => Some(m - n),
            _ => None,
        }
    }
}

/// Metropolis chain on U(n) targeting |det(1 + U)|^{2p} dμ(U), with
/// left-multiplication by Cayley steps.
struct UnitaryChain {
    u: CMatrix,
    ln_weight: f64,
    power: f64,
    eps: f64,
    accepted: usize,
    proposed: usize,
}

impl UnitaryChain {
    fn new<R: Rng + ?Sized>(n: usize, power: usize, rng: &mut R) -> Self {
        let u = sample_haar_unitary(n, rng);
        let power = power as f64;
        let ln_weight = 2.0 * power * ln_abs_det_one_plus(&u);
        Self { u, ln_weight, power, eps: 0.5, accepted: 0, proposed: 0 }
    }

    fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let v = random_unitary_step(self.u.nrows(), self.eps, rng);
        let cand = v * &self.u;
        let lw = 2.0 * self.power * ln_abs_det_one_plus(&cand);
        self.proposed += 1;
        let log_u: f64 = rng.random::<f64>().ln();
        if lw.is_finite() && (lw >= self.ln_weight || log_u < lw - self.ln_weight) {
            self.u = cand;
            self.ln_weight = lw;
            self.accepted += 1;
        }
    }

    fn burn_in<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let batch = 50;
        for _ in 0..UNITARY_BURN_IN / batch {
            let (a0, p0) = (self.accepted, self.proposed);
            for _ in 0..batch {
                self.step(rng);
            }
            let rate = (self.accepted - a0) as f64 / (self.proposed - p0) as f64;
            self.eps = (self.eps * (rate - 0.35).exp()).clamp(1e-3, 4.0);
        }
        self.accepted = 0;
        self.proposed = 0;
    }

    fn acceptance(&self) -> f64 {
        if self.proposed == 0 {
            1.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

/// Reusable sampler for one plan.
#[derive(Debug, Clone)]
pub struct DirectSampler {
    plan: DirectPlan,
    lower: f64,
    upper: f64,
}

impl DirectSampler {
    pub fn new(spec: &EnsembleSpec) -> Result<Self> {
        let plan = direct_plan(spec)?;
        let d = spec.domain();
        Ok(Self { plan, lower: d.lower, upper: d.upper })
    }

    pub fn plan(&self) -> &DirectPlan {
        &self.plan
    }

    fn in_domain(&self, ev: &[f64]) -> bool {
        ev.iter().all(|&x| x > self.lower && x < self.upper && x.is_finite())
    }

    /// Eigenvalues of one matrix draw; `u` supplies the unitary factor for
    /// the Cayley and Bures constructions.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, u: Option<&CMatrix>) -> Result<Vec<f64>> {
        let fail = |what: &str| MonteCarloError::Diagonalization(what.to_string());
        match &self.plan {
            DirectPlan::Gaussian { d } => Ok(hermitian_eigenvalues(&sample_gaussian_hermitian(d, rng))),
            DirectPlan::Wishart { n, m, sigma } => Ok(hermitian_eigenvalues(&sample_wishart(*n, *m, sigma, rng))),
            DirectPlan::CayleyUnitary { n, .. } => {
                let owned;
                let u = match u {
                    Some(u) => u,
                    None => {
                        owned = sample_haar_unitary(*n, rng);
                        &owned
                    }
                };
                let h = cayley_hermitian(u).ok_or_else(|| fail("1 + U is singular"))?;
                Ok(hermitian_eigenvalues(&h))
            }
            DirectPlan::WishartRatio { n, m_a, m_b, sigma } => {
                let a = sample_wishart(*n, *m_a, sigma, rng);
                let b = sample_wishart(*n, *m_b, &[], rng);
                generalized_eigenvalues(&a, &b).ok_or_else(|| fail("W_B is not positive definite"))
            }
            DirectPlan::Manova { n, m_a, m_b, sigma } => {
                let a = sample_wishart(*n, *m_a, sigma, rng);
                let b = sample_wishart(*n, *m_b, &[], rng);
                generalized_eigenvalues(&a, &(&a + b)).ok_or_else(|| fail("W_A + W_B is not positive definite"))
            }
            DirectPlan::BuresUnitary { n, m } => {
                let owned;
                let u = match u {
                    Some(u) => u,
                    None => {
                        owned = sample_haar_unitary(*n, rng);
                        &owned
                    }
                };
                let w = sample_wishart(*n, *m, &[], rng);
                let half = (CMatrix::identity(*n, *n) + u) * Complex::new(0.5, 0.0);
                let h = &half * w * half.adjoint();
                Ok(hermitian_eigenvalues(&h))
            }
        }
    }

    /// One spectrum inside the open domain; a draw that rounds onto the
    /// boundary is redrawn.
    fn draw_in_domain<R: Rng + ?Sized>(&self, rng: &mut R, u: Option<&CMatrix>) -> Result<Vec<f64>> {
        for _ in 0..DOMAIN_RETRIES {
            let ev = self.draw(rng, u)?;
            if self.in_domain(&ev) {
                return Ok(ev);
            }
        }
        Err(MonteCarloError::Diagonalization("eigenvalues repeatedly fell on the domain boundary".into()))
    }

    /// `realizations` spectra, deterministic in `seed` regardless of
    /// scheduling. Also returns the unitary-chain acceptance when one ran.
    pub fn run(&self, realizations: usize, seed: u64, exec: Execution) -> Result<(Vec<SpectrumSample>, Option<f64>)> {
        match self.plan.unitary_power() {
            Some(p) if p > 0 => {
                let n = self.plan.n();
                let blocks = UNITARY_BLOCKS.min(realizations);
                let per = realizations / blocks;
                let extra = realizations % blocks;
                let out = try_map_range(exec, blocks, |b| -> Result<(Vec<SpectrumSample>, f64)> {
                    let count = per + usize::from(b < extra);
                    let mut rng = stream_rng(seed, b as u64);
                    let mut chain = UnitaryChain::new(n, p, &mut rng);
                    chain.burn_in(&mut rng);
                    let mut v = Vec::with_capacity(count);
                    for _ in 0..count {
                        for _ in 0..UNITARY_THIN {
                            chain.step(&mut rng);
                        }
                        let ev = self.draw_in_domain(&mut rng, Some(&chain.u))?;
                        v.push(SpectrumSample::new(ev, SampleSource::UnitaryChain, b));
                    }
                    Ok((v, chain.acceptance()))
                })?;
                let rate = out.iter().map(|(_, a)| a).sum::<f64>() / out.len() as f64;
                Ok((out.into_iter().flat_map(|(v, _)| v).collect(), Some(rate)))
            }
            _ => {
                let v = try_map_range(exec, realizations, |i| {
                    let mut rng = stream_rng(seed, i as u64);
                    self.draw_in_domain(&mut rng, None).map(|ev| SpectrumSample::new(ev, SampleSource::Direct, 0))
                })?;
                Ok((v, None))
            }
        }
    }
}

/// One spectrum from the family's matrix model. Weighted-unitary
/// constructions run a fresh burned-in chain for the single draw.
pub fn sample_spectrum_direct<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<SpectrumSample> {
    let sampler = DirectSampler::new(spec)?;
    match sampler.plan.unitary_power() {
        Some(p) if p > 0 => {
            let mut chain = UnitaryChain::new(sampler.plan.n(), p, rng);
            chain.burn_in(rng);
            let ev = sampler.draw_in_domain(rng, Some(&chain.u))?;
            Ok(SpectrumSample::new(ev, SampleSource::UnitaryChain, 0))
        }
        _ => Ok(SpectrumSample::new(sampler.draw_in_domain(rng, None)?, SampleSource::Direct, 0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::stream_rng;

    #[test]
    fn plans_follow_integer_rules() {
        let lue = EnsembleSpec::uncorrelated(Family::LaguerreWishart, 3).with_alpha(2.0);
        assert_eq!(direct_plan(&lue).unwrap(), DirectPlan::Wishart { n: 3, m: 5, sigma: vec![] });
        let frac = lue.clone().with_alpha(0.5);
        assert!(matches!(direct_plan(&frac), Err(MonteCarloError::NotDirectlyConstructible(_))));
        let cl1 = EnsembleSpec::correlated(Family::CauchyLorentzI, vec![1.0, 2.0]).with_kappa(2.0);
        assert!(matches!(direct_plan(&cl1), Err(MonteCarloError::NotDirectlyConstructible(_))));
        let bures = EnsembleSpec::uncorrelated(Family::BuresHall, 2).with_alpha(-0.5);
        assert_eq!(direct_plan(&bures).unwrap(), DirectPlan::BuresUnitary { n: 2, m: 2 });
        let jac = EnsembleSpec::correlated(Family::JacobiManova, vec![0.5, 2.0]).with_alpha(1.0).with_beta(1.0).with_kappa(7.0);
        assert!(direct_plan(&jac).is_err());
        assert!(direct_plan(&jac.with_kappa(6.0)).is_ok());
    }

    #[test]
    fn jacobi_samples_stay_in_unit_interval() {
        let spec = EnsembleSpec::uncorrelated(Family::JacobiManova, 2).with_alpha(3.0).with_beta(1.0);
        let mut rng = stream_rng(11, 0);
        for _ in 0..500 {
            let s = sample_spectrum_direct(&spec, &mut rng).unwrap();
            assert!(s.eigenvalues.iter().all(|&x| x > 0.0 && x < 1.0));
            assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn runs_are_reproducible_across_schedules() {
        let spec = EnsembleSpec::uncorrelated(Family::CauchyLorentzI, 2).with_kappa(3.0);
        let s = DirectSampler::new(&spec).unwrap();
        let (a, _) = s.run(300, 5, Execution::Parallel).unwrap();
        let (b, _) = s.run(300, 5, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 300);
    }
}

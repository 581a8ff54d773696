//! Monte-Carlo oracles: explicit matrix samplers, a log-gas Metropolis
//! sampler driven by the model's own joint density, and empirical
//! estimators with binomial error bars.

mod direct;
mod loggas;
pub mod matrices;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::Model;
use crate::ensembles::{EnsembleSpec, SpecError};
use crate::par::Execution;

pub use direct::{direct_plan, sample_spectrum_direct, DirectPlan, DirectSampler};
pub use loggas::{sample_spectrum_loggas, LogGasChain, LogGasRun};
pub use matrices::{sample_ginibre, sample_haar_unitary};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonteCarloError {
    #[error("no direct matrix construction for these parameters ({0}); use the log-gas sampler")]
    NotDirectlyConstructible(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("empty sample set")]
    EmptySamples,
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("diagonalization failed: {0}")]
    Diagonalization(String),
    #[error("log-gas chain {chain} found no finite starting point after {attempts} attempts")]
    InitFailed { chain: usize, attempts: usize },
}

pub type Result<T> = std::result::Result<T, MonteCarloError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMethod {
    /// Direct when a matrix construction exists, log-gas otherwise.
    #[default]
    Auto,
    Direct,
    LogGas,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogGasConfig {
    /// Discarded sweeps per chain; `None` means 5000·n.
    pub burn_in: Option<usize>,
    /// Sweeps between kept states; `None` means n.
    pub thinning: Option<usize>,
    /// Initial Gaussian step in the transformed coordinate.
    pub proposal_width: f64,
    /// Tune the step during burn-in towards 35% acceptance.
    pub adapt: bool,
    /// Independent chains; realizations are split evenly among them.
    pub chains: usize,
}

impl Default for LogGasConfig {
    fn default() -> Self {
        Self { burn_in: None, thinning: None, proposal_width: 0.5, adapt: true, chains: 16 }
    }
}

impl LogGasConfig {
    pub fn burn_in_for(&self, n: usize) -> usize {
        self.burn_in.unwrap_or(5000 * n)
    }

    pub fn thinning_for(&self, n: usize) -> usize {
        self.thinning.unwrap_or(n).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub realizations: usize,
    pub seed: u64,
    pub method: SamplingMethod,
    pub loggas: LogGasConfig,
    pub execution: Execution,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            realizations: 50_000,
            seed: 20_240_601,
            method: SamplingMethod::Auto,
            loggas: LogGasConfig::default(),
            execution: Execution::Parallel,
        }
    }
}

impl SimulationConfig {
    pub fn with_realizations(mut self, realizations: usize) -> Self {
        self.realizations = realizations;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_method(mut self, method: SamplingMethod) -> Self {
        self.method = method;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(MonteCarloError::Config("realizations must be at least 1".into()));
        }
        if self.loggas.thinning == Some(0) {
            return Err(MonteCarloError::Config("thinning must be at least 1".into()));
        }
        if !(self.loggas.proposal_width > 0.0) || !self.loggas.proposal_width.is_finite() {
            return Err(MonteCarloError::Config("proposal_width must be positive".into()));
        }
        if self.loggas.chains == 0 {
            return Err(MonteCarloError::Config("chains must be at least 1".into()));
        }
        Ok(())
    }
}

/// Where a spectrum came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleSource {
    /// Independent matrix draw.
    Direct,
    /// Matrix draw built on a unitary from a Metropolis chain.
    UnitaryChain,
    /// Eigenvalue Metropolis chain.
    LogGas,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub source: SampleSource,
    /// Chain or block index; 0 for independent draws.
    pub chain: usize,
}

impl SpectrumSample {
    pub fn new(mut eigenvalues: Vec<f64>, source: SampleSource, chain: usize) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Self { eigenvalues, source, chain }
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: Option<u64>,
}

impl EstimateWithError {
    /// |value − x| in units of the standard error (infinite when the error
    /// is zero and the values differ).
    pub fn z_score(&self, x: f64) -> f64 {
        let d = (self.value - x).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }

    /// Binomial fraction with its standard error.
    pub fn binomial(hits: usize, total: usize) -> Self {
        let p = hits as f64 / total as f64;
        Self { value: p, std_error: (p * (1.0 - p) / total as f64).sqrt(), n_samples: total, seed: None }
    }
}

/// Output of [`simulate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRun {
    pub samples: Vec<SpectrumSample>,
    pub method: SamplingMethod,
    pub seed: u64,
    /// Post-burn-in Metropolis acceptance, when a chain was involved.
    pub acceptance_rate: Option<f64>,
    /// Proposals whose joint-density sign disagreed with the reference
    /// sign; these are rejected and counted.
    pub sign_violations: u64,
    pub restarts: usize,
}

impl SimulationRun {
    pub fn gap(&self, r: f64, s: f64) -> Result<EstimateWithError> {
        estimate_gap(&self.samples, r, s).map(|e| EstimateWithError { seed: Some(self.seed), ..e })
    }

    pub fn double_gap(&self, r: f64, s: f64) -> Result<EstimateWithError> {
        estimate_double_gap(&self.samples, r, s).map(|e| EstimateWithError { seed: Some(self.seed), ..e })
    }
}

/// RNG for item `index` of a run: the seed picks the key and the index
/// picks the stream, so results do not depend on scheduling.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws `config.realizations` spectra from the model's ensemble.
pub fn simulate(model: &Model, config: &SimulationConfig) -> Result<SimulationRun> {
    config.validate()?;
    let spec = model.spec();
    let method = match config.method {
        SamplingMethod::Auto => {
            if direct_plan(spec).is_ok() {
                SamplingMethod::Direct
            } else {
                SamplingMethod::LogGas
            }
        }
        m => m,
    };
    match method {
        SamplingMethod::Direct => {
            let sampler = DirectSampler::new(spec)?;
            let (samples, acceptance_rate) = sampler.run(config.realizations, config.seed, config.execution)?;
            Ok(SimulationRun {
                samples,
                method,
                seed: config.seed,
                acceptance_rate,
                sign_violations: 0,
                restarts: 0,
            })
        }
        _ => {
            let run = sample_spectrum_loggas(model, config)?;
            Ok(SimulationRun {
                samples: run.samples,
                method: SamplingMethod::LogGas,
                seed: config.seed,
                acceptance_rate: Some(run.acceptance_rate),
                sign_violations: run.sign_violations,
                restarts: run.restarts,
            })
        }
    }
}

/// Convenience: validate and simulate straight from a spec.
pub fn simulate_spec(spec: &EnsembleSpec, config: &SimulationConfig) -> std::result::Result<SimulationRun, Box<dyn std::error::Error + Send + Sync>> {
    let model = crate::ensembles::build(spec)?;
    Ok(simulate(&model, config)?)
}

fn check_interval(r: f64, s: f64) -> Result<()> {
    if r.is_nan() || s.is_nan() || r > s {
        return Err(MonteCarloError::InvalidQuery(format!("need r ≤ s, got ({r}, {s})")));
    }
    Ok(())
}

/// Fraction of samples satisfying `pred`. Chain output is autocorrelated,
/// so for chain sources the error is the larger of the binomial error and
/// the batch-means error over chains.
fn fraction(samples: &[SpectrumSample], pred: impl Fn(&SpectrumSample) -> bool) -> EstimateWithError {
    let total = samples.len();
    let mut per_chain: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let mut hits = 0;
    let mut chained = false;
    for x in samples {
        let hit = pred(x);
        hits += hit as usize;
        chained |= x.source != SampleSource::Direct;
        let e = per_chain.entry(x.chain).or_default();
        e.0 += hit as usize;
        e.1 += 1;
    }
    let mut est = EstimateWithError::binomial(hits, total);
    if chained && per_chain.len() >= 2 {
        let means: Vec<f64> = per_chain.values().map(|&(h, t)| h as f64 / t as f64).collect();
        let k = means.len() as f64;
        let m = means.iter().sum::<f64>() / k;
        let var = means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (k - 1.0);
        est.std_error = est.std_error.max((var / k).sqrt());
    }
    est
}

/// Fraction of spectra with no eigenvalue in the open interval (r, s).
pub fn estimate_gap(samples: &[SpectrumSample], r: f64, s: f64) -> Result<EstimateWithError> {
    check_interval(r, s)?;
    if samples.is_empty() {
        return Err(MonteCarloError::EmptySamples);
    }
    Ok(fraction(samples, |x| !x.eigenvalues.iter().any(|&l| l > r && l < s)))
}

/// Fraction of spectra lying entirely in [r, s].
pub fn estimate_double_gap(samples: &[SpectrumSample], r: f64, s: f64) -> Result<EstimateWithError> {
    check_interval(r, s)?;
    if samples.is_empty() {
        return Err(MonteCarloError::EmptySamples);
    }
    Ok(fraction(samples, |x| x.min() >= r && x.max() <= s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extreme {
    Min,
    Max,
}

impl Extreme {
    pub fn of(self, s: &SpectrumSample) -> f64 {
        match self {
            Extreme::Min => s.min(),
            Extreme::Max => s.max(),
        }
    }
}

/// Density histogram: `density[i]` is the count in [edges[i], edges[i+1])
/// divided by (total samples × bin width).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub density: Vec<f64>,
    pub std_error: Vec<f64>,
    pub n_samples: usize,
}

impl Histogram {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Σ density·width; 1 when every sample falls inside the edges.
    pub fn integral(&self) -> f64 {
        self.edges.windows(2).zip(&self.density).map(|(w, d)| d * (w[1] - w[0])).sum()
    }
}

/// Histogram of λ_min or λ_max over the observed range.
pub fn estimate_extreme_density(samples: &[SpectrumSample], which: Extreme, bins: usize) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(MonteCarloError::EmptySamples);
    }
    let values: Vec<f64> = samples.iter().map(|s| which.of(s)).collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(MonteCarloError::InvalidQuery("degenerate sample range".into()));
    }
    // Widen the top edge by one ulp-scale step so the maximum lands inside.
    let hi = hi + (hi - lo) * 1e-12;
    histogram_on(samples, which, lo, hi, bins)
}

/// Histogram of λ_min or λ_max on fixed bins over [lo, hi); samples outside
/// the range still count towards the normalization.
pub fn histogram_on(samples: &[SpectrumSample], which: Extreme, lo: f64, hi: f64, bins: usize) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(MonteCarloError::EmptySamples);
    }
    if bins < 2 {
        return Err(MonteCarloError::InvalidQuery("need at least 2 bins".into()));
    }
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(MonteCarloError::InvalidQuery(format!("degenerate range [{lo}, {hi})")));
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + width * i as f64).collect();
    let mut counts = vec![0usize; bins];
    for s in samples {
        let v = which.of(s);
        if v >= lo && v < hi {
            let i = (((v - lo) / width) as usize).min(bins - 1);
            counts[i] += 1;
        }
    }
    let total = samples.len() as f64;
    let density = counts.iter().map(|&c| c as f64 / (total * width)).collect();
    let std_error = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            (p * (1.0 - p) / total).sqrt() / width
        })
        .collect();
    Ok(Histogram { edges, counts, density, std_error, n_samples: samples.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(values: &[&[f64]]) -> Vec<SpectrumSample> {
        values.iter().map(|v| SpectrumSample::new(v.to_vec(), SampleSource::Direct, 0)).collect()
    }

    #[test]
    fn empty_interval_gap_is_certain() {
        let s = synthetic(&[&[0.1, 0.4], &[0.2, 0.3]]);
        let e = estimate_gap(&s, 0.25, 0.25).unwrap();
        assert_eq!((e.value, e.std_error), (1.0, 0.0));
    }

    #[test]
    fn spectra_right_of_s_are_gaps() {
        let s = synthetic(&[&[2.0, 3.0], &[2.5, 4.0]]);
        assert_eq!(estimate_gap(&s, 0.0, 1.0).unwrap().value, 1.0);
        assert_eq!(estimate_double_gap(&s, f64::NEG_INFINITY, f64::INFINITY).unwrap().value, 1.0);
    }

    #[test]
    fn single_eigenvalue_gap_and_double_gap_complement() {
        let s = synthetic(&[&[0.1], &[0.5], &[0.7], &[1.5]]);
        let e = estimate_gap(&s, 0.3, 1.0).unwrap().value;
        let d = estimate_double_gap(&s, 0.3, 1.0).unwrap().value;
        assert_eq!(e + d, 1.0);
    }

    #[test]
    fn estimators_reject_bad_input() {
        assert_eq!(estimate_gap(&[], 0.0, 1.0), Err(MonteCarloError::EmptySamples));
        let s = synthetic(&[&[0.0]]);
        assert!(matches!(estimate_gap(&s, 1.0, 0.0), Err(MonteCarloError::InvalidQuery(_))));
        assert!(matches!(estimate_extreme_density(&s, Extreme::Min, 10), Err(MonteCarloError::InvalidQuery(_))));
    }

    #[test]
    fn histogram_integrates_to_one() {
        let v: Vec<Vec<f64>> = (0..1000).map(|i| vec![(i as f64 * 0.618).fract(), 2.0]).collect();
        let s: Vec<SpectrumSample> = v.into_iter().map(|e| SpectrumSample::new(e, SampleSource::Direct, 0)).collect();
        let h = estimate_extreme_density(&s, Extreme::Min, 20).unwrap();
        assert!((h.integral() - 1.0).abs() < 1e-12);
        assert_eq!(h.counts.iter().sum::<usize>(), 1000);
    }

    #[test]
    fn config_validation() {
        assert!(SimulationConfig::default().validate().is_ok());
        assert!(SimulationConfig::default().with_realizations(0).validate().is_err());
        let mut c = SimulationConfig::default();
        c.loggas.proposal_width = 0.0;
        assert!(c.validate().is_err());
        c.loggas.proposal_width = 0.5;
        c.loggas.thinning = Some(0);
        assert!(c.validate().is_err());
    }
}

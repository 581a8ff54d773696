//! Metropolis sampling of the eigenvalue joint density itself, treating
//! −ln P as the energy of a log-gas. Works for any real parameters the
//! analytic side accepts.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{stream_rng, MonteCarloError, Result, SampleSource, SimulationConfig, SpectrumSample};
use crate::engine::{Kernel, Model};
use crate::ensembles::Family;
use crate::linalg::{det_sign_log, pfaffian, SquareMatrix};
use crate::par::try_map_range;

const MAX_ATTEMPTS: usize = 5;
const ADAPT_BATCH: usize = 50;
const TARGET_ACCEPTANCE: f64 = 0.35;
/// Stream offset keeping log-gas chains apart from direct-draw streams.
const STREAM_OFFSET: u64 = 1 << 40;

/// Monotone change of variable x = φ(y) that maps ℝ onto the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
enum CoordMap {
    Identity,
    /// x = sinh y; heavy tails become light.
    Asinh,
    /// x = e^y.
    Log,
    /// x = 1/(1 + e^(−y)).
    Logit,
}

impl CoordMap {
    fn for_family(f: Family) -> Self {
        match f {
            Family::GaussWigner => CoordMap::Identity,
            Family::CauchyLorentzI => CoordMap::Asinh,
            Family::LaguerreWishart | Family::CauchyLorentzII | Family::BuresHall => CoordMap::Log,
            Family::JacobiManova => CoordMap::Logit,
        }
    }

    fn to_x(self, y: f64) -> f64 {
        match self {
            CoordMap::Identity => y,
            CoordMap::Asinh => y.sinh(),
            CoordMap::Log => y.exp(),
            CoordMap::Logit => 1.0 / (1.0 + (-y).exp()),
        }
    }

    #[cfg(test)]
    fn to_y(self, x: f64) -> f64 {
        match self {
            CoordMap::Identity => x,
            CoordMap::Asinh => x.asinh(),
            CoordMap::Log => x.ln(),
            CoordMap::Logit => (x / (1.0 - x)).ln(),
        }
    }

    /// ln φ'(y).
    fn ln_jacobian(self, y: f64, x: f64) -> f64 {
        match self {
            CoordMap::Identity => 0.0,
            CoordMap::Asinh => y.cosh().ln(),
            CoordMap::Log => y,
            CoordMap::Logit => x.ln() + (1.0 - x).ln(),
        }
    }
}

/// ln |P| and the sign of the unnormalized joint density.
fn log_density(kernel: &Kernel, x: &[f64]) -> Option<(f64, f64)> {
    let n = x.len();
    let mut lnw = 0.0;
    let weight = |v: f64| match kernel {
        Kernel::TypeI(k) => k.weight(v),
        Kernel::TypeII(k) => k.weight(v),
    };
    for &v in x {
        let w = weight(v);
        if !(w > 0.0) || !w.is_finite() {
            return None;
        }
        lnw += w.ln();
    }
    let mut g = SquareMatrix::zeros(n, n);
    let mut fcol = vec![0.0; n];
    let mut gcol = vec![0.0; n];
    let (sign, lnabs) = match kernel {
        Kernel::TypeI(k) => {
            let mut f = SquareMatrix::zeros(n, n);
            for (c, &v) in x.iter().enumerate() {
                k.fg(v, &mut fcol, &mut gcol);
                for j in 0..n {
                    f[(j, c)] = fcol[j];
                    g[(j, c)] = gcol[j];
                }
            }
            let (sf, lf) = det_sign_log(&f).ok()?;
            let (sg, lg) = det_sign_log(&g).ok()?;
            (sf * sg, lf + lg)
        }
        Kernel::TypeII(k) => {
            for (c, &v) in x.iter().enumerate() {
                k.funcs(v, &mut gcol);
                for j in 0..n {
                    g[(j, c)] = gcol[j];
                }
            }
            let dim = n + n % 2;
            let mut a = SquareMatrix::zeros(dim, dim);
            for j in 0..n {
                for l in j + 1..n {
                    let v = k.pair(x[j], x[l]);
                    a[(j, l)] = v;
                    a[(l, j)] = -v;
                }
                if dim > n {
                    a[(j, n)] = 1.0;
                    a[(n, j)] = -1.0;
                }
            }
            let pf = pfaffian(&a).ok()?;
            let (sg, lg) = det_sign_log(&g).ok()?;
            (pf.signum() * sg, pf.abs().ln() + lg)
        }
    };
    let total = lnabs + lnw;
    (total.is_finite() && sign != 0.0).then_some((total, sign))
}

/// Mean location and spread used to seed chains.
fn initial_layout(model: &Model) -> (f64, f64) {
    let spec = model.spec();
    let n = spec.n as f64;
    let scale = if spec.sigma.is_empty() { 1.0 } else { spec.sigma.iter().sum::<f64>() / spec.sigma.len() as f64 };
    match spec.family {
        Family::GaussWigner => (0.0, scale * n.sqrt()),
        Family::CauchyLorentzI => (0.0, 1.0),
        Family::LaguerreWishart => ((scale * (n + spec.alpha.max(0.0) + 1.0)).ln(), 1.0),
        Family::CauchyLorentzII | Family::BuresHall => (scale.ln(), 1.0),
        Family::JacobiManova => (0.0, 1.5),
    }
}

/// One Metropolis chain on the ordered eigenvalue vector, in transformed
/// coordinates y with λ = φ(y).
pub struct LogGasChain<'a> {
    kernel: &'a Kernel,
    map: CoordMap,
    lower: f64,
    upper: f64,
    y: Vec<f64>,
    x: Vec<f64>,
    energy: f64,
    width: f64,
    accepted: u64,
    proposed: u64,
    sign_violations: u64,
}

impl<'a> LogGasChain<'a> {
    /// Starts from a spread-out layout; each retry shrinks or widens it.
    pub fn start<R: Rng + ?Sized>(model: &'a Model, width: f64, rng: &mut R, chain: usize) -> Result<(Self, usize)> {
        let map = CoordMap::for_family(model.spec().family);
        let (lower, upper) = model.domain();
        let n = model.n();
        let (center, spread) = initial_layout(model);
        let factors = [1.0, 0.5, 2.0, 0.25, 1.5];
        for (attempt, fac) in factors.iter().enumerate().take(MAX_ATTEMPTS) {
            let mut y: Vec<f64> = (0..n)
                .map(|k| {
                    let t = if n == 1 { 0.0 } else { 2.0 * (k as f64 + 0.5) / n as f64 - 1.0 };
                    let jitter: f64 = rng.random::<f64>() - 0.5;
                    center + fac * spread * (t + 0.1 * jitter / n as f64)
                })
                .collect();
            y.sort_by(f64::total_cmp);
            let x: Vec<f64> = y.iter().map(|&v| map.to_x(v)).collect();
            if !x.iter().all(|&v| v > lower && v < upper) || x.windows(2).any(|w| w[0] >= w[1]) {
                continue;
            }
            if let Some((lnp, sign)) = log_density(model.kernel(), &x) {
                if sign > 0.0 {
                    let energy = lnp + y.iter().zip(&x).map(|(&a, &b)| map.ln_jacobian(a, b)).sum::<f64>();
                    let chain = Self {
                        kernel: model.kernel(),
                        map,
                        lower,
                        upper,
                        y,
                        x,
                        energy,
                        width,
                        accepted: 0,
                        proposed: 0,
                        sign_violations: 0,
                    };
                    return Ok((chain, attempt));
                }
            }
        }
        Err(MonteCarloError::InitFailed { chain, attempts: MAX_ATTEMPTS })
    }

    /// One single-coordinate Metropolis update per eigenvalue.
    pub fn sweep<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let n = self.y.len();
        for i in 0..n {
            self.proposed += 1;
            let step: f64 = rng.sample(StandardNormal);
            let yi = self.y[i] + self.width * step;
            if (i > 0 && yi <= self.y[i - 1]) || (i + 1 < n && yi >= self.y[i + 1]) {
                continue;
            }
            let xi = self.map.to_x(yi);
            if !(xi > self.lower && xi < self.upper) || (i > 0 && xi <= self.x[i - 1]) || (i + 1 < n && xi >= self.x[i + 1]) {
                continue;
            }
            let old = (self.y[i], self.x[i]);
            self.y[i] = yi;
            self.x[i] = xi;
            let accepted = match log_density(self.kernel, &self.x) {
                Some((lnp, sign)) if sign > 0.0 => {
                    let e = lnp + self.y.iter().zip(&self.x).map(|(&a, &b)| self.map.ln_jacobian(a, b)).sum::<f64>();
                    let log_u: f64 = rng.random::<f64>().ln();
                    if e >= self.energy || log_u < e - self.energy {
                        self.energy = e;
                        true
                    } else {
                        false
                    }
                }
                Some(_) => {
                    self.sign_violations += 1;
                    false
                }
                None => false,
            };
            if accepted {
                self.accepted += 1;
            } else {
                self.y[i] = old.0;
                self.x[i] = old.1;
            }
        }
    }

    /// Burn-in with optional step-size tuning; counters reset afterwards.
    pub fn burn_in<R: Rng + ?Sized>(&mut self, sweeps: usize, adapt: bool, rng: &mut R) {
        let mut done = 0;
        while done < sweeps {
            let batch = ADAPT_BATCH.min(sweeps - done);
            let (a0, p0) = (self.accepted, self.proposed);
            for _ in 0..batch {
                self.sweep(rng);
            }
            done += batch;
            if adapt && self.proposed > p0 {
                let rate = (self.accepted - a0) as f64 / (self.proposed - p0) as f64;
                self.width = (self.width * (rate - TARGET_ACCEPTANCE).exp()).clamp(1e-4, 10.0);
            }
        }
        self.accepted = 0;
        self.proposed = 0;
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.x
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn acceptance(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    pub fn sign_violations(&self) -> u64 {
        self.sign_violations
    }
}

/// Aggregate over all chains of a log-gas run.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGasRun {
    pub samples: Vec<SpectrumSample>,
    /// Post-burn-in acceptance averaged over chains.
    pub acceptance_rate: f64,
    pub sign_violations: u64,
    pub restarts: usize,
}

/// Runs `config.loggas.chains` independent chains and pools their kept
/// states, `config.realizations` in total.
pub fn sample_spectrum_loggas(model: &Model, config: &SimulationConfig) -> Result<LogGasRun> {
    config.validate()?;
    let n = model.n();
    let lg = &config.loggas;
    let chains = lg.chains.min(config.realizations);
    let per = config.realizations / chains;
    let extra = config.realizations % chains;
    let burn = lg.burn_in_for(n);
    let thin = lg.thinning_for(n);
    let out = try_map_range(config.execution, chains, |c| -> Result<(Vec<SpectrumSample>, f64, u64, usize)> {
        let mut rng = stream_rng(config.seed, STREAM_OFFSET + c as u64);
        let (mut chain, restarts) = LogGasChain::start(model, lg.proposal_width, &mut rng, c)?;
        chain.burn_in(burn, lg.adapt, &mut rng);
        let count = per + usize::from(c < extra);
        let mut v = Vec::with_capacity(count);
        for _ in 0..count {
            for _ in 0..thin {
                chain.sweep(&mut rng);
            }
            v.push(SpectrumSample::new(chain.eigenvalues().to_vec(), SampleSource::LogGas, c));
        }
        Ok((v, chain.acceptance(), chain.sign_violations(), restarts))
    })?;
    let acceptance_rate = out.iter().map(|o| o.1).sum::<f64>() / out.len() as f64;
    let sign_violations = out.iter().map(|o| o.2).sum();
    let restarts = out.iter().map(|o| o.3).sum();
    let samples = out.into_iter().flat_map(|o| o.0).collect();
    Ok(LogGasRun { samples, acceptance_rate, sign_violations, restarts })
}

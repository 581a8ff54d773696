//! Catalog of the six ensemble families, each in a correlated (Σ ≠ 1) and
//! an uncorrelated variant, compiled into engine models.

mod closed;
mod type1;
mod type2;

pub use closed::closed_partition;
pub use type1::{
    ClIICorrelated, ClIIUncorrelated, ClIUncorrelated, Gue, JacobiAppell, JacobiCauchyMap, JacobiUncorrelated,
    LaguerreCorrelated, Lue,
};
pub use type2::{BuresCorrelated, BuresUncorrelated, ClICorrelated, GaussWignerCorrelated};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{FastPath, Kernel, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    GaussWigner,
    LaguerreWishart,
    #[serde(rename = "cauchy-lorentz-i")]
    CauchyLorentzI,
    #[serde(rename = "cauchy-lorentz-ii")]
    CauchyLorentzII,
    JacobiManova,
    BuresHall,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::GaussWigner,
        Family::LaguerreWishart,
        Family::CauchyLorentzI,
        Family::CauchyLorentzII,
        Family::JacobiManova,
        Family::BuresHall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::GaussWigner => "gauss-wigner",
            Family::LaguerreWishart => "laguerre-wishart",
            Family::CauchyLorentzI => "cauchy-lorentz-i",
            Family::CauchyLorentzII => "cauchy-lorentz-ii",
            Family::JacobiManova => "jacobi-manova",
            Family::BuresHall => "bures-hall",
        }
    }

    pub fn domain(self) -> DomainTag {
        match self {
            Family::GaussWigner | Family::CauchyLorentzI => DomainTag { lower: f64::NEG_INFINITY, upper: f64::INFINITY },
            Family::LaguerreWishart | Family::CauchyLorentzII | Family::BuresHall => {
                DomainTag { lower: 0.0, upper: f64::INFINITY }
            }
            Family::JacobiManova => DomainTag { lower: 0.0, upper: 1.0 },
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = SpecError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .or(match key.as_str() {
                "gue" | "wigner" => Some(Family::GaussWigner),
                "wishart" | "lue" | "laguerre" => Some(Family::LaguerreWishart),
                "cl1" | "cl-i" => Some(Family::CauchyLorentzI),
                "cl2" | "cl-ii" => Some(Family::CauchyLorentzII),
                "jacobi" | "manova" => Some(Family::JacobiManova),
                "bures" => Some(Family::BuresHall),
                _ => None,
            })
            .ok_or_else(|| SpecError::UnknownFamily(s.to_string()))
    }
}

/// Eigenvalue support (𝕝, 𝕦) of a family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainTag {
    pub lower: f64,
    pub upper: f64,
}

/// Which kernel representation to use for correlated Jacobi ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JacobiRoute {
    /// The Cauchy map when β = κ − α − 2n, the Appell kernels otherwise.
    #[default]
    Auto,
    /// Appell F₁ kernels, valid for any κ.
    Appell,
    /// Map λ = μ/(1+μ) onto a Cauchy–Lorentz II model; needs β = κ − α − 2n.
    CauchyMap,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("unknown ensemble family '{0}'")]
    UnknownFamily(String),
    #[error("parameter constraint violated: {0}")]
    Constraint(String),
    #[error("σ has {got} entries, expected n = {expected}")]
    SigmaLength { expected: usize, got: usize },
    #[error("σ values must be positive and finite")]
    NonPositiveSigma,
    #[error("σ_{i} and σ_{j} are (nearly) equal; perturb them explicitly")]
    DegenerateSigma { i: usize, j: usize },
    #[error("uncorrelated ensembles take no σ")]
    UnexpectedSigma,
    #[error("limit case needing a limiting procedure: {0}")]
    LimitCase(String),
    #[error("partition function is not positive (reduced value {0})")]
    NonPositivePartition(f64),
    #[error("partition function {computed} disagrees with the closed form {closed}")]
    PartitionMismatch { computed: f64, closed: f64 },
    #[error("numerical failure while building the model: {0}")]
    Numerical(String),
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

/// User-facing description of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub family: Family,
    #[serde(default)]
    pub correlated: bool,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sigma: Vec<f64>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub beta: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "is_default_route")]
    pub jacobi_route: JacobiRoute,
}

fn is_default_route(r: &JacobiRoute) -> bool {
    *r == JacobiRoute::Auto
}

/// Relative σ gap below which two σ values count as degenerate.
const SIGMA_GAP: f64 = 1e-6;
/// Tolerance for recognising β = κ − α − 2n.
const CAUCHY_MAP_TOL: f64 = 1e-12;

impl EnsembleSpec {
    pub fn uncorrelated(family: Family, n: usize) -> Self {
        Self { family, correlated: false, n, sigma: Vec::new(), alpha: 0.0, beta: 0.0, kappa: 0.0, jacobi_route: JacobiRoute::Auto }
    }

    pub fn correlated(family: Family, sigma: Vec<f64>) -> Self {
        Self { correlated: true, n: sigma.len(), sigma, ..Self::uncorrelated(family, 0) }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_route(mut self, route: JacobiRoute) -> Self {
        self.jacobi_route = route;
        self
    }

    pub fn domain(&self) -> DomainTag {
        self.family.domain()
    }

    /// True when β = κ − α − 2n, so the correlated Jacobi ensemble maps
    /// onto Cauchy–Lorentz II.
    pub fn jacobi_cauchy_map_applies(&self) -> bool {
        let n = self.n as f64;
        (self.beta - (self.kappa - self.alpha - 2.0 * n)).abs() <= CAUCHY_MAP_TOL
    }

    /// Checks every parameter constraint and returns a copy with σ sorted
    /// ascending (the eigenvalue law is symmetric in σ; the ascending order
    /// makes every Vandermonde-type normalisation positive).
    pub fn validated(&self) -> Result<EnsembleSpec, SpecError> {
        let n = self.n;
        if n == 0 {
            return Err(SpecError::Constraint("n ≥ 1".into()));
        }
        let nf = n as f64;
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(SpecError::Constraint(format!("{name} must be finite")))
            }
        };
        finite("α", self.alpha)?;
        finite("β", self.beta)?;
        finite("κ", self.kappa)?;
        let mut out = self.clone();
        if self.correlated {
            if self.sigma.len() != n {
                return Err(SpecError::SigmaLength { expected: n, got: self.sigma.len() });
            }
            if self.sigma.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
                return Err(SpecError::NonPositiveSigma);
            }
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| self.sigma[a].total_cmp(&self.sigma[b]));
            for w in idx.windows(2) {
                let (a, b) = (self.sigma[w[0]], self.sigma[w[1]]);
                if b - a <= SIGMA_GAP * b {
                    return Err(SpecError::DegenerateSigma { i: w[0] + 1, j: w[1] + 1 });
                }
            }
            out.sigma = idx.iter().map(|&i| self.sigma[i]).collect();
        } else if !self.sigma.is_empty() {
            return Err(SpecError::UnexpectedSigma);
        }
        let (a, b, k) = (self.alpha, self.beta, self.kappa);
        match self.family {
            Family::GaussWigner => {}
            Family::LaguerreWishart | Family::BuresHall => {
                if !(a > -1.0) {
                    return Err(SpecError::Constraint(format!("α > −1 (got α = {a})")));
                }
            }
            Family::CauchyLorentzI => {
                if !(k > nf - 0.5) {
                    return Err(SpecError::Constraint(format!("κ > n − 1/2 (got κ = {k}, n = {n})")));
                }
            }
            Family::CauchyLorentzII => {
                if !(a > -1.0) {
                    return Err(SpecError::Constraint(format!("α > −1 (got α = {a})")));
                }
                if !(k > 2.0 * nf + a - 1.0) {
                    return Err(SpecError::Constraint(format!("κ > 2n + α − 1 (got κ = {k}, n = {n}, α = {a})")));
                }
            }
            Family::JacobiManova => {
                if !(a > -1.0) || !(b > -1.0) {
                    return Err(SpecError::Constraint(format!("α, β > −1 (got α = {a}, β = {b})")));
                }
                if self.correlated {
                    let c = k - nf + 1.0;
                    // c = −m with m ≤ n − 2 leaves fewer than n independent
                    // g_k, so the determinant form degenerates.
                    if c <= 0.0 && c == c.round() && -c <= nf - 2.0 {
                        return Err(SpecError::LimitCase(format!("κ − n + 1 = {c} with n = {n}")));
                    }
                    if self.jacobi_route == JacobiRoute::CauchyMap && !self.jacobi_cauchy_map_applies() {
                        return Err(SpecError::Constraint(format!(
                            "the Cauchy map route needs β = κ − α − 2n (got β = {b}, κ − α − 2n = {})",
                            k - a - 2.0 * nf
                        )));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Compiles an ensemble description into an evaluable model.
pub fn build(spec: &EnsembleSpec) -> Result<Model, crate::engine::EngineError> {
    let spec = spec.validated()?;
    let n = spec.n;
    let (a, b, k) = (spec.alpha, spec.beta, spec.kappa);
    let s = spec.sigma.clone();
    let mut fast = FastPath::None;
    let kernel = match (spec.family, spec.correlated) {
        (Family::GaussWigner, false) => Kernel::TypeI(Box::new(Gue::new(n))),
        (Family::GaussWigner, true) => Kernel::TypeII(Box::new(GaussWignerCorrelated::new(s))),
        (Family::LaguerreWishart, false) => {
            if a == 0.0 {
                fast = FastPath::ExponentialSf { rate: n as f64 };
            }
            Kernel::TypeI(Box::new(Lue::new(n, a)))
        }
        (Family::LaguerreWishart, true) => {
            if a == 0.0 {
                fast = FastPath::ExponentialSf { rate: s.iter().map(|v| 1.0 / v).sum() };
            }
            Kernel::TypeI(Box::new(LaguerreCorrelated::new(a, s)))
        }
        (Family::CauchyLorentzI, false) => Kernel::TypeI(Box::new(ClIUncorrelated::new(n, k))),
        (Family::CauchyLorentzI, true) => Kernel::TypeII(Box::new(ClICorrelated::new(k, s))),
        (Family::CauchyLorentzII, false) => Kernel::TypeI(Box::new(ClIIUncorrelated::new(n, a, k))),
        (Family::CauchyLorentzII, true) => Kernel::TypeI(Box::new(ClIICorrelated::new(a, k, s))),
        (Family::JacobiManova, false) => Kernel::TypeI(Box::new(JacobiUncorrelated::new(n, a, b))),
        (Family::JacobiManova, true) => {
            let map = match spec.jacobi_route {
                JacobiRoute::Auto => spec.jacobi_cauchy_map_applies(),
                JacobiRoute::Appell => false,
                JacobiRoute::CauchyMap => true,
            };
            if map {
                Kernel::TypeI(Box::new(JacobiCauchyMap::new(a, b, k, s)))
            } else {
                Kernel::TypeI(Box::new(JacobiAppell::new(a, b, k, s)))
            }
        }
        (Family::BuresHall, false) => Kernel::TypeII(Box::new(BuresUncorrelated::new(n, a))),
        (Family::BuresHall, true) => Kernel::TypeII(Box::new(BuresCorrelated::new(a, s))),
    };
    let closed = closed_partition(&spec);
    Model::new(spec, kernel, closed, fast)
}

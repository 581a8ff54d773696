//! Real-valued special functions used by the ensemble kernels.
//!
//! Everything here works in plain `f64` arithmetic. Complex prefactors that
//! show up in the textbook forms of the kernels (for instance incomplete Beta
//! functions at negative arguments) are rewritten into manifestly real
//! combinations such as [`beta_inc_negarg`].

mod gamma;
mod hyper;
mod incgamma;

pub use gamma::{barnes_g, beta, gamma, ln_barnes_g, ln_gamma, rgamma};
pub use hyper::{appell_f1, beta_inc, beta_inc_negarg, beta_tail_negarg, hyp2f1, hyp2f1_with};
pub use incgamma::{erf, erfc, gamma_lower, gamma_pair, gamma_upper};

use thiserror::Error;

/// Failure modes of the special-function kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("{function}: argument outside the domain ({detail})")]
    Domain { function: &'static str, detail: String },
    #[error("{function}: pole at c = {c}")]
    Pole { function: &'static str, c: f64 },
    #[error("{function}: no convergence after {terms} terms")]
    NonConvergence { function: &'static str, terms: usize },
    #[error("{function}: overflow")]
    Overflow { function: &'static str },
    #[error("{function}: quadrature failed: {detail}")]
    Quadrature { function: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, SpecialError>;

/// Truncation control for series and continued fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl SeriesControl {
    pub fn new(rel_tol: f64, abs_tol: f64, max_terms: usize) -> Self {
        assert!(rel_tol > 0.0, "rel_tol must be positive");
        assert!(abs_tol >= 0.0, "abs_tol must be non-negative");
        assert!(max_terms >= 1, "max_terms must be at least 1");
        Self { rel_tol, abs_tol, max_terms }
    }

    /// True once `term` no longer changes `sum` at the requested accuracy.
    #[inline]
    pub(crate) fn converged(&self, term: f64, sum: f64) -> bool {
        term.abs() <= self.rel_tol * sum.abs() || term.abs() <= self.abs_tol
    }
}

impl Default for SeriesControl {
    /// Kernel entries feed determinants whose cancellations amplify relative
    /// error by several orders, so series are summed to working precision.
    fn default() -> Self {
        Self { rel_tol: 1e-16, abs_tol: 0.0, max_terms: 100_000 }
    }
}

pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> SpecialError {
    SpecialError::Domain { function, detail: detail.into() }
}

/// True when `x` is a non-positive integer.
pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

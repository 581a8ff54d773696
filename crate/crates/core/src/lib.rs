//! Exact gap probabilities and extreme-eigenvalue statistics for complex
//! random-matrix ensembles of determinant (Type I) and Pfaffian (Type II)
//! structure, with Monte-Carlo samplers to cross-check every analytic value.

pub mod engine;
pub mod ensembles;
pub mod linalg;
pub mod montecarlo;
pub mod par;
pub mod quadrature;
pub mod specfun;

pub use engine::{
    DensityMethod, DensityValue, EngineError, FastPath, GapQuery, Kernel, KernelKind, KernelMatrix, Model, Quantity,
    TypeIIKernel, TypeIKernel,
};
pub use ensembles::{build, DomainTag, EnsembleSpec, Family, JacobiRoute, SpecError};
pub use montecarlo::{
    estimate_double_gap, estimate_extreme_density, estimate_gap, simulate, EstimateWithError, Extreme, Histogram,
    MonteCarloError, SamplingMethod, SimulationConfig, SimulationRun, SpectrumSample,
};
pub use par::Execution;

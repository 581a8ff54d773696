//! Command-line front end for `rmt-gaps`: configuration parsing, result
//! serialization, and the harness that re-derives the published gap
//! probability tables.

pub mod app;
pub mod config;
pub mod curve;
pub mod error;
pub mod output;
pub mod report;
pub mod tables;

pub use app::run;
pub use config::{parse_real, parse_spec, spec_to_toml, ConfigFile, EnsembleOverrides};
pub use curve::curve;
pub use error::CliError;
pub use output::{emit, fmt_sig, Abscissa, Format, ResultRow};
pub use report::{mc_agrees, reproduce_table, ReproduceOptions, RunReport, MC_SIGMAS, ROUNDING_SLACK};
pub use tables::{table, tables, Table, TABLE_IDS};

//! Configuration handling and suite dispatch behind the `rootfock` binary.

pub mod config;
pub mod runner;
pub mod sweep;

pub use config::{BackendChoice, ConfigFile, Format, Params, RunConfig, Suite, UsageError};
pub use runner::{run_point, PositivitySummary, RunReport};
pub use sweep::{sweep, SweepReport, SweepRow, WORKERS_ENV};

//! Batch front-end for the `qswitch` library: scenario configs, sweeps,
//! U(2) searches, invariant suites and figure datasets, all written as CSV.

pub mod config;
pub mod error;
pub mod figures;
pub mod minimize;
pub mod sweep;
pub mod table;
pub mod verify;

pub use error::{CliError, Result};

/// Directory holding the committed figure baselines.
pub const BASELINE_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/baselines");

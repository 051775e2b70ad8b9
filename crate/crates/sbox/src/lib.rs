//! Benchmark runner for `sbox-core`: TOML configuration, result files,
//! parallel execution and the `sbox` command line.
//!
//! A run writes
//!
//! ```text
//! <out>/<suite>/manifest.json
//! <out>/<suite>/<problem>/<algorithm>/rep<k>.csv
//! <out>/<suite>/status.json
//! <out>/<suite>/scores.json
//! <out>/<suite>/convergence.csv
//! ```
//!
//! and `sbox score <out>/<suite>` recomputes `scores.json` from the CSV
//! files alone.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod runner;

pub use config::{resolve, PartialConfig, RunConfig};
pub use error::CliError;
pub use runner::{rescore, run_suite, verify, RunOutcome};

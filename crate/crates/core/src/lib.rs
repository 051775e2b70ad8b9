//! Surrogate-based (model-based derivative-free) optimization.
//!
//! This crate carries everything that is pure computation: box-bounded
//! black-box problems, Latin hypercube designs, the four surrogate families
//! (Gaussian process, quadratic, linear, cubic RBF), the optimizers built on
//! them, the synthetic and chemical-engineering benchmark problems, and the
//! normalized trajectory scores used to compare optimizers.
//!
//! The crate is `no_std` and only needs an allocator. File formats, the
//! parallel benchmark runner and the command line live in the `sbox` crate.
//!
//! ```
//! use sbox_core::optimizers::{run_optimizer, Algorithm};
//! use sbox_core::problems::registry;
//!
//! let problem = registry::lookup("quadratic-d2").unwrap();
//! let trajectory = run_optimizer(Algorithm::Lsqm, &problem, 20, 7).unwrap();
//! assert_eq!(trajectory.len(), 20);
//! ```

#![no_std]
#![warn(missing_docs)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bench;
pub mod casestudies;
mod dataset;
mod error;
mod evaluation;
pub mod linalg;
pub mod optimizers;
mod problem;
pub mod problems;
pub mod rng;
mod sampling;
pub mod surrogates;

pub use dataset::Dataset;
pub use error::{ConfigError, EvalError, FitError, SimError};
pub use evaluation::{best_so_far, Evaluation, Evaluator, Fallback, RunStatus, Trajectory};
pub use problem::{BlackBox, Bounds, KnownOptimum, NoiseSpec, Problem};
pub use sampling::latin_hypercube;

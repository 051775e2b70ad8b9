//! Benchmark problems: unconstrained test functions, constrained 2-D
//! problems and a string-keyed registry.

pub mod constrained;
pub mod functions;
pub mod registry;

pub use constrained::{constrained_suite, ConstrainedProblemSpec, VIOLATION_THRESHOLD};
pub use functions::{ackley, levy, matyas, quadratic_ill, rosenbrock};

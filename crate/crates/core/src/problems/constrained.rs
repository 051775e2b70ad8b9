//! Two-dimensional constrained benchmark problems, `g(x) <= 0` feasible.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::functions::{matyas, rosenbrock};
use crate::error::ConfigError;
use crate::problem::{Bounds, Problem};

/// A violation is counted when some `g_i(x)` exceeds this value.
pub const VIOLATION_THRESHOLD: f64 = 0.001;

/// Names accepted by [`constrained_suite`].
pub const CONSTRAINED_NAMES: [&str; 3] = ["rosenbrock", "quadratic", "matyas"];

type ScalarFn = fn(&[f64]) -> f64;

/// Closed-form constrained problem.
#[derive(Debug, Clone)]
pub struct ConstrainedProblemSpec {
    /// Short name (`rosenbrock`, `quadratic`, `matyas`).
    pub name: &'static str,
    /// Objective.
    pub objective: fn(&[f64]) -> f64,
    /// Constraints, each feasible when `<= 0`.
    pub constraints: Vec<fn(&[f64]) -> f64>,
    /// Violation counting threshold.
    pub violation_threshold: f64,
    /// Search box.
    pub bounds: Bounds,
}

fn rosenbrock_g(x: &[f64]) -> f64 {
    x[0] + 1.27 - 2.83 * x[1] + 0.69 * x[1] * x[1]
}

fn quadratic_f(x: &[f64]) -> f64 {
    x[0] * x[0] + 0.95 * x[0] * x[1] + 5.9 * x[1] * x[1]
}

fn quadratic_g(x: &[f64]) -> f64 {
    1.5 * x[0] + 0.6 - x[1]
}

fn matyas_g(x: &[f64]) -> f64 {
    6.31 * x[0] + 3.60 - x[1]
}

/// Constrained problem by name.
pub fn constrained_suite(name: &str) -> Result<ConstrainedProblemSpec, ConfigError> {
    let (name, objective, g): (&'static str, ScalarFn, ScalarFn) = match name {
        "rosenbrock" => ("rosenbrock", rosenbrock, rosenbrock_g),
        "quadratic" => ("quadratic", quadratic_f, quadratic_g),
        "matyas" => ("matyas", matyas, matyas_g),
        other => {
            return Err(ConfigError::UnknownKey {
                kind: "constrained problem",
                key: other.into(),
            })
        }
    };
    Ok(ConstrainedProblemSpec {
        name,
        objective,
        constraints: vec![g],
        violation_threshold: VIOLATION_THRESHOLD,
        bounds: Bounds::uniform(2, -5.0, 5.0)?,
    })
}

impl ConstrainedProblemSpec {
    /// Objective and constraint values at `x`.
    pub fn evaluate(&self, x: &[f64]) -> (f64, Vec<f64>) {
        (
            (self.objective)(x),
            self.constraints.iter().map(|g| g(x)).collect(),
        )
    }

    /// Whether every constraint is within the violation threshold.
    pub fn is_feasible(&self, x: &[f64]) -> bool {
        self.constraints
            .iter()
            .all(|g| g(x) <= self.violation_threshold)
    }

    /// The spec as a black-box [`Problem`] named `<name>-c`.
    pub fn to_problem(&self) -> Problem {
        let objective = self.objective;
        let constraints = self.constraints.clone();
        Problem::from_constrained_fn(
            format!("{}-c", self.name),
            self.bounds.clone(),
            constraints.len(),
            move |x| (objective(x), constraints.iter().map(|g| g(x)).collect()),
        )
    }
}

use alloc::string::String;
use thiserror::Error;

/// Failure of a single black-box evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    /// The evaluation budget of the run is used up.
    #[error("evaluation budget of {budget} exhausted")]
    BudgetExhausted {
        /// Configured budget.
        budget: usize,
    },
    /// The objective (or a constraint) returned NaN or infinity.
    #[error("non-finite value at evaluation {index}")]
    NonFinite {
        /// 1-based evaluation index.
        index: usize,
    },
    /// The point does not have the problem's dimension.
    #[error("point has dimension {got}, problem expects {expected}")]
    Dimension {
        /// Problem dimension.
        expected: usize,
        /// Offered dimension.
        got: usize,
    },
}

/// Failure of a surrogate fit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    /// Not enough samples for the requested model.
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples {
        /// Minimum sample count.
        needed: usize,
        /// Available samples.
        got: usize,
    },
    /// Kernel matrix stayed indefinite after the largest jitter.
    #[error("kernel matrix not positive definite (jitter up to {max_jitter:e})")]
    NotPositiveDefinite {
        /// Largest jitter tried.
        max_jitter: f64,
    },
    /// Linear system could not be solved.
    #[error("singular system (condition estimate {condition:e})")]
    Singular {
        /// Ratio of largest to smallest singular value, `inf` when exactly singular.
        condition: f64,
    },
    /// Inputs contained NaN or infinity.
    #[error("non-finite training data")]
    NonFinite,
}

/// Invalid configuration of a run, problem or benchmark.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    /// Budget smaller than the initial design.
    #[error("budget {budget} is smaller than the initial design size {initial}")]
    BudgetTooSmall {
        /// Requested budget.
        budget: usize,
        /// Initial design size of the algorithm.
        initial: usize,
    },
    /// Bounds with `lower >= upper` or mismatched lengths.
    #[error("invalid bounds: {0}")]
    Bounds(String),
    /// Unknown key in a registry.
    #[error("unknown {kind} `{key}`")]
    UnknownKey {
        /// What kind of key (problem, algorithm, ...).
        kind: &'static str,
        /// The offending key.
        key: String,
    },
    /// Any other invalid value.
    #[error("{0}")]
    Invalid(String),
}

/// Failure of a process simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    /// State left its physical range during integration.
    #[error("state blew up at t = {time}")]
    Blowup {
        /// Simulation time of the first bad state.
        time: f64,
    },
    /// Steady-state solve did not reach the tolerance.
    #[error("steady-state solve stalled at residual {residual:e}")]
    NotConverged {
        /// Final residual infinity norm.
        residual: f64,
    },
    /// Input or parameter out of range.
    #[error("{0}")]
    Invalid(String),
}

use alloc::string::String;
use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, EvalError};
use crate::problem::Problem;
use crate::rng::{self, Rng, Stream};

/// One observed sample of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// 1-based evaluation counter within the run.
    pub index: usize,
    /// Evaluated point.
    pub x: Vec<f64>,
    /// Observed objective (noise included).
    pub y: f64,
    /// Observed constraint values, `g <= 0` feasible.
    pub g: Vec<f64>,
}

impl Evaluation {
    /// Largest constraint value, `-inf` without constraints.
    pub fn max_violation(&self) -> f64 {
        self.g.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether every constraint is at most `threshold`.
    pub fn is_feasible(&self, threshold: f64) -> bool {
        self.g.iter().all(|v| *v <= threshold)
    }
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RunStatus {
    /// The full budget was evaluated.
    Complete,
    /// The run stopped early.
    Failed {
        /// Human-readable cause.
        reason: String,
    },
}

/// An optimizer step that could not be carried out and was replaced by a
/// random proposal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fallback {
    /// Evaluation index the fallback proposal received.
    pub index: usize,
    /// Cause reported by the optimizer.
    pub reason: String,
}

/// Ordered evaluation history of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Evaluations in order; indices are `1..=len`.
    pub evaluations: Vec<Evaluation>,
    /// Evaluation budget `n_e`.
    pub budget: usize,
    /// Base seed of the run.
    pub seed: u64,
    /// Termination status.
    pub status: RunStatus,
    /// Steps replaced by random proposals.
    pub fallbacks: Vec<Fallback>,
}

impl Trajectory {
    /// Empty trajectory.
    pub fn new(budget: usize, seed: u64) -> Self {
        Self {
            evaluations: Vec::new(),
            budget,
            seed,
            status: RunStatus::Complete,
            fallbacks: Vec::new(),
        }
    }

    /// Number of evaluations.
    pub fn len(&self) -> usize {
        self.evaluations.len()
    }

    /// Whether nothing was evaluated.
    pub fn is_empty(&self) -> bool {
        self.evaluations.is_empty()
    }

    /// Observed objective values.
    pub fn values(&self) -> Vec<f64> {
        self.evaluations.iter().map(|e| e.y).collect()
    }

    /// Running minimum of the observed objective.
    pub fn best_so_far(&self) -> Result<Vec<f64>, ConfigError> {
        best_so_far(&self.values())
    }

    /// Running minimum over evaluations feasible within `threshold`;
    /// `+inf` until the first feasible evaluation.
    pub fn best_feasible_so_far(&self, threshold: f64) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.evaluations
            .iter()
            .map(|e| {
                if e.is_feasible(threshold) && e.y < best {
                    best = e.y;
                }
                best
            })
            .collect()
    }

    /// Best evaluation feasible within `threshold`.
    pub fn best_feasible(&self, threshold: f64) -> Option<&Evaluation> {
        self.evaluations
            .iter()
            .filter(|e| e.is_feasible(threshold))
            .min_by(|a, b| a.y.total_cmp(&b.y))
    }

    /// Whether the run evaluated its whole budget.
    pub fn is_complete(&self) -> bool {
        self.status == RunStatus::Complete && self.len() == self.budget
    }
}

/// Running minimum: `out[k] = min(values[..=k])`.
pub fn best_so_far(values: &[f64]) -> Result<Vec<f64>, ConfigError> {
    if values.is_empty() {
        return Err(ConfigError::Invalid(
            "best_so_far of an empty trajectory".into(),
        ));
    }
    let mut best = f64::INFINITY;
    Ok(values
        .iter()
        .map(|&v| {
            if v < best {
                best = v;
            }
            best
        })
        .collect())
}

/// Budgeted, noisy evaluation of a [`Problem`].
pub struct Evaluator<'a> {
    problem: &'a Problem,
    budget: usize,
    used: usize,
    noise: Rng,
}

impl<'a> Evaluator<'a> {
    /// Evaluator with its noise stream derived from `seed`.
    pub fn new(problem: &'a Problem, budget: usize, seed: u64) -> Self {
        Self {
            problem,
            budget,
            used: 0,
            noise: rng::stream(seed, Stream::Noise),
        }
    }

    /// Evaluations still available.
    pub fn remaining(&self) -> usize {
        self.budget - self.used
    }

    /// Evaluations consumed.
    pub fn used(&self) -> usize {
        self.used
    }

    /// Evaluate `x` (clipped to the bounds) and count it against the budget.
    pub fn evaluate(&mut self, x: &[f64]) -> Result<Evaluation, EvalError> {
        if self.used >= self.budget {
            return Err(EvalError::BudgetExhausted {
                budget: self.budget,
            });
        }
        if x.len() != self.problem.dim() {
            return Err(EvalError::Dimension {
                expected: self.problem.dim(),
                got: x.len(),
            });
        }
        let x = self.problem.bounds().clipped(x);
        let (f, mut g) = self.problem.evaluate_exact(&x);
        self.used += 1;
        let index = self.used;
        if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(EvalError::NonFinite { index });
        }
        let noise = self.problem.noise();
        let mut y = f;
        if noise.is_noisy() {
            let e: f64 = StandardNormal.sample(&mut self.noise);
            y += noise.sigma * e;
            if noise.constraint_noise {
                for v in g.iter_mut() {
                    let e: f64 = StandardNormal.sample(&mut self.noise);
                    *v += noise.sigma * e;
                }
            }
        }
        Ok(Evaluation { index, x, y, g })
    }
}

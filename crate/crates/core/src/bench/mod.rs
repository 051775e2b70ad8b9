//! Benchmark protocol and scoring.
//!
//! A benchmark is a grid of cells (problem × algorithm × repetition). Each
//! cell runs one optimizer for the problem's budget with a seed hashed from
//! the base seed and the cell coordinates, so cells can run in any order or
//! in parallel and still reproduce.

mod score;

use alloc::string::String;
use alloc::vec::Vec;

pub use score::{
    convergence, count_violations, feasibility_row, quantile, score_cells, score_p, score_r,
    scoring_curve, AlgorithmScores, CellRecord, ConvergenceRow, ProblemScores, ScoreTable,
    ViolationStats,
};

use crate::error::ConfigError;
use crate::optimizers::{run_optimizer_with, Algorithm, OptimizerConfig};
use crate::problem::Problem;
use crate::problems::registry::{self, Preset};
use crate::problems::VIOLATION_THRESHOLD;
use crate::rng;

/// Default number of repetitions per cell.
pub const DEFAULT_REPETITIONS: usize = 5;

/// What to run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    /// Optimizers; each runs on the problems it supports.
    pub algorithms: Vec<Algorithm>,
    /// Problem registry keys.
    pub problems: Vec<String>,
    /// Repetitions per (problem, algorithm).
    pub repetitions: usize,
    /// Base seed.
    pub seed: u64,
    /// Feasibility threshold.
    pub violation_threshold: f64,
    /// Budget for every problem instead of its preset.
    pub budget: Option<usize>,
    /// Warm-up for every problem instead of its preset.
    pub warmup: Option<usize>,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            algorithms: Algorithm::ALL.to_vec(),
            problems: registry::Suite::Unconstrained.keys(&registry::DEFAULT_DIMS),
            repetitions: DEFAULT_REPETITIONS,
            seed: 0,
            violation_threshold: VIOLATION_THRESHOLD,
            budget: None,
            warmup: None,
        }
    }
}

/// One run of the benchmark grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    /// Problem key.
    pub problem: String,
    /// Optimizer.
    pub algorithm: Algorithm,
    /// Repetition index.
    pub repetition: usize,
    /// Run seed.
    pub seed: u64,
    /// Budget and warm-up.
    pub preset: Preset,
    /// Whether the problem has constraints.
    pub constrained: bool,
}

/// Seed of a cell; the problem key carries the dimension.
pub fn cell_seed(base: u64, algorithm: Algorithm, problem: &str, repetition: usize) -> u64 {
    let s = rng::combine(base, rng::hash_bytes(algorithm.tag().as_bytes()));
    let s = rng::combine(s, rng::hash_bytes(problem.as_bytes()));
    rng::combine(s, repetition as u64)
}

impl BenchmarkConfig {
    /// Budget and warm-up of a problem.
    pub fn preset(&self, problem: &str) -> Result<Preset, ConfigError> {
        let base = registry::preset(problem)?;
        let p = Preset {
            budget: self.budget.unwrap_or(base.budget),
            warmup: self.warmup.unwrap_or(base.warmup),
        };
        if p.budget <= p.warmup {
            return Err(ConfigError::Invalid(alloc::format!(
                "{problem}: budget {} must exceed warm-up {}",
                p.budget,
                p.warmup
            )));
        }
        Ok(p)
    }

    /// Check every field; problem keys must resolve.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.repetitions == 0 {
            return Err(ConfigError::Invalid(
                "repetitions must be at least 1".into(),
            ));
        }
        if self.algorithms.is_empty() || self.problems.is_empty() {
            return Err(ConfigError::Invalid(
                "no algorithms or no problems selected".into(),
            ));
        }
        if !(self.violation_threshold >= 0.0) {
            return Err(ConfigError::Invalid(
                "violation threshold must be non-negative".into(),
            ));
        }
        for p in &self.problems {
            registry::lookup(p)?;
            self.preset(p)?;
        }
        Ok(())
    }

    /// Every cell in problem, algorithm, repetition order. Algorithms that
    /// do not support a problem are skipped.
    pub fn cells(&self) -> Result<Vec<Cell>, ConfigError> {
        self.validate()?;
        let mut out = Vec::new();
        for key in &self.problems {
            let problem = registry::lookup(key)?;
            let preset = self.preset(key)?;
            for &a in &self.algorithms {
                if !a.supports(&problem) {
                    continue;
                }
                for rep in 0..self.repetitions {
                    out.push(Cell {
                        problem: key.clone(),
                        algorithm: a,
                        repetition: rep,
                        seed: cell_seed(self.seed, a, key, rep),
                        preset,
                        constrained: problem.is_constrained(),
                    });
                }
            }
        }
        Ok(out)
    }
}

/// Run one cell with the default optimizer settings.
pub fn run_cell(cell: &Cell) -> CellRecord {
    run_cell_with(cell, &OptimizerConfig::default())
}

/// Run one cell on its registry problem. A run that cannot start is
/// recorded without a trajectory.
pub fn run_cell_with(cell: &Cell, cfg: &OptimizerConfig) -> CellRecord {
    match registry::lookup(&cell.problem) {
        Ok(p) => run_cell_on(cell, &p, cfg),
        Err(e) => failed_cell(cell, &e),
    }
}

/// Run one cell on an explicitly built problem (for example a case study
/// with non-default settings).
pub fn run_cell_on(cell: &Cell, problem: &Problem, cfg: &OptimizerConfig) -> CellRecord {
    match run_optimizer_with(cell.algorithm, problem, cell.preset.budget, cell.seed, cfg) {
        Ok(t) => record(cell, Some(t)),
        Err(e) => failed_cell(cell, &e),
    }
}

fn failed_cell(cell: &Cell, e: &ConfigError) -> CellRecord {
    log::error!(
        "{} / {} / rep {}: {}",
        cell.problem,
        cell.algorithm,
        cell.repetition,
        e
    );
    record(cell, None)
}

fn record(cell: &Cell, trajectory: Option<crate::Trajectory>) -> CellRecord {
    CellRecord {
        problem: cell.problem.clone(),
        algorithm: cell.algorithm,
        repetition: cell.repetition,
        budget: cell.preset.budget,
        warmup: cell.preset.warmup,
        constrained: cell.constrained,
        trajectory,
    }
}

/// Run every cell sequentially and score them.
pub fn run_benchmark(
    config: &BenchmarkConfig,
) -> Result<(Vec<CellRecord>, ScoreTable), ConfigError> {
    let records: Vec<CellRecord> = config.cells()?.iter().map(run_cell).collect();
    let table = score_cells(&records, config.violation_threshold);
    Ok((records, table))
}

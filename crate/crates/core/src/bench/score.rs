//! Normalized trajectory scores and feasibility metrics.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::evaluation::{Evaluation, Trajectory};
use crate::optimizers::Algorithm;

/// Relative placement `(worst - mean) / (worst - best)` of one mean
/// trajectory value between the worst and best algorithm means. A
/// universal tie (`worst == best`) scores 1.
pub fn score_r(worst: f64, best: f64, mean: f64) -> f64 {
    if worst == best {
        return 1.0;
    }
    ((worst - mean) / (worst - best)).clamp(0.0, 1.0)
}

/// Mean of the per-iteration scores.
pub fn score_p(r: &[f64]) -> f64 {
    if r.is_empty() {
        return 0.0;
    }
    r.iter().sum::<f64>() / r.len() as f64
}

/// Share of feasible evaluations and the mean largest constraint value of
/// the violating ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationStats {
    /// Fraction of evaluations with every `g_i <= threshold`.
    pub feasible_fraction: f64,
    /// Mean of `max_i g_i` over violating evaluations, 0 without any.
    pub mean_violation: f64,
}

/// Violation statistics of a set of evaluations; an evaluation violates
/// when `max_i g_i > threshold`.
pub fn count_violations<'a>(
    evaluations: impl IntoIterator<Item = &'a Evaluation>,
    threshold: f64,
) -> ViolationStats {
    let (mut n, mut bad, mut sum) = (0usize, 0usize, 0.0);
    for e in evaluations {
        n += 1;
        let worst = e.max_violation();
        if worst > threshold {
            bad += 1;
            sum += worst;
        }
    }
    ViolationStats {
        feasible_fraction: if n == 0 {
            1.0
        } else {
            (n - bad) as f64 / n as f64
        },
        mean_violation: if bad == 0 { 0.0 } else { sum / bad as f64 },
    }
}

/// Best-so-far curve used for scoring: the running minimum, or for
/// constrained problems the running minimum over evaluations feasible
/// within `threshold` (`+inf` before the first one).
pub fn scoring_curve(trajectory: &Trajectory, constrained: bool, threshold: f64) -> Vec<f64> {
    if constrained {
        trajectory.best_feasible_so_far(threshold)
    } else {
        let mut best = f64::INFINITY;
        trajectory
            .evaluations
            .iter()
            .map(|e| {
                best = best.min(e.y);
                best
            })
            .collect()
    }
}

/// `q`-quantile (`0 <= q <= 1`) of sorted values, linear interpolation
/// between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let h = q * (n - 1) as f64;
            let lo = libm::floor(h) as usize;
            let hi = (lo + 1).min(n - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

/// One finished (or failed) run of a benchmark cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRecord {
    /// Problem key.
    pub problem: String,
    /// Optimizer.
    pub algorithm: Algorithm,
    /// Repetition index.
    pub repetition: usize,
    /// Evaluation budget `n_e`.
    pub budget: usize,
    /// Warm-up length `n_c`.
    pub warmup: usize,
    /// Whether the problem has constraints.
    pub constrained: bool,
    /// The trajectory, `None` when the run could not be started.
    pub trajectory: Option<Trajectory>,
}

impl CellRecord {
    /// Whether the run evaluated its full budget.
    pub fn is_complete(&self) -> bool {
        self.trajectory
            .as_ref()
            .is_some_and(|t| t.is_complete() && t.budget == self.budget)
    }
}

/// Scores of one algorithm on one problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmScores {
    /// Optimizer.
    pub algorithm: Algorithm,
    /// Repetitions that evaluated their whole budget.
    pub completed: usize,
    /// Repetitions that did not.
    pub failed: usize,
    /// Overall score `p_a`; `None` without completed repetitions.
    pub p: Option<f64>,
    /// Per-iteration scores `r_k` after the warm-up.
    pub r: Vec<f64>,
    /// Mean best-so-far curve after the warm-up.
    pub mean_best: Vec<f64>,
    /// Feasibility over all evaluations of the completed repetitions
    /// (constrained problems only).
    pub violations: Option<ViolationStats>,
}

/// Scores of every algorithm on one problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemScores {
    /// Problem key.
    pub problem: String,
    /// Evaluation budget.
    pub budget: usize,
    /// Warm-up length.
    pub warmup: usize,
    /// Whether the problem has constraints.
    pub constrained: bool,
    /// One entry per algorithm, in first-seen order.
    pub algorithms: Vec<AlgorithmScores>,
}

/// Benchmark scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    /// Feasibility threshold used.
    pub violation_threshold: f64,
    /// One entry per problem, in first-seen order.
    pub problems: Vec<ProblemScores>,
}

/// Percentile band of the best-so-far curves of one (problem, algorithm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    /// Problem key.
    pub problem: String,
    /// Optimizer.
    pub algorithm: Algorithm,
    /// 1-based evaluation count.
    pub iteration: usize,
    /// Mean over repetitions.
    pub mean: f64,
    /// 10th percentile.
    pub p10: f64,
    /// 90th percentile.
    pub p90: f64,
}

fn first_seen<T: PartialEq + Clone>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out = Vec::new();
    for i in items {
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

/// Completed scoring curves of every algorithm on `problem`, infinite
/// entries replaced by the worst finite value of the problem.
fn problem_curves(
    records: &[&CellRecord],
    threshold: f64,
) -> Vec<(Algorithm, Vec<Vec<f64>>, usize)> {
    let algorithms = first_seen(records.iter().map(|r| r.algorithm));
    let mut out: Vec<(Algorithm, Vec<Vec<f64>>, usize)> = algorithms
        .iter()
        .map(|a| {
            let mine: Vec<&&CellRecord> = records.iter().filter(|r| r.algorithm == *a).collect();
            let curves: Vec<Vec<f64>> = mine
                .iter()
                .filter(|r| r.is_complete())
                .map(|r| {
                    scoring_curve(
                        r.trajectory.as_ref().expect("complete"),
                        r.constrained,
                        threshold,
                    )
                })
                .collect();
            let failed = mine.len() - curves.len();
            (*a, curves, failed)
        })
        .collect();
    let worst = out
        .iter()
        .flat_map(|(_, c, _)| c.iter().flatten())
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let fill = if worst.is_finite() { worst } else { 0.0 };
    for (_, curves, _) in out.iter_mut() {
        for v in curves.iter_mut().flatten() {
            if !v.is_finite() {
                *v = fill;
            }
        }
    }
    out
}

/// Score a set of benchmark runs.
///
/// Per problem: the first `warmup` iterations are dropped, the curves of
/// each algorithm are averaged over its completed repetitions, every
/// iteration is scored with [`score_r`] against the worst and best
/// algorithm means, and `p` is the mean of those scores.
pub fn score_cells(records: &[CellRecord], threshold: f64) -> ScoreTable {
    let problems = first_seen(records.iter().map(|r| r.problem.clone()));
    let problems = problems
        .into_iter()
        .map(|name| {
            let mine: Vec<&CellRecord> = records.iter().filter(|r| r.problem == name).collect();
            let (budget, warmup, constrained) =
                (mine[0].budget, mine[0].warmup, mine[0].constrained);
            let curves = problem_curves(&mine, threshold);
            let n = budget.saturating_sub(warmup);
            let means: Vec<Option<Vec<f64>>> = curves
                .iter()
                .map(|(_, c, _)| {
                    (!c.is_empty()).then(|| {
                        (warmup..budget)
                            .map(|k| c.iter().map(|curve| curve[k]).sum::<f64>() / c.len() as f64)
                            .collect()
                    })
                })
                .collect();
            let algorithms = curves
                .iter()
                .zip(&means)
                .map(|((a, c, failed), mean)| {
                    let r: Vec<f64> = match mean {
                        Some(m) => (0..n)
                            .map(|k| {
                                let col = means.iter().flatten().map(|mm| mm[k]);
                                let worst = col.clone().fold(f64::NEG_INFINITY, f64::max);
                                let best = col.fold(f64::INFINITY, f64::min);
                                score_r(worst, best, m[k])
                            })
                            .collect(),
                        None => Vec::new(),
                    };
                    let violations = constrained.then(|| {
                        count_violations(
                            mine.iter()
                                .filter(|rec| rec.algorithm == *a && rec.is_complete())
                                .flat_map(|rec| {
                                    rec.trajectory
                                        .as_ref()
                                        .expect("complete")
                                        .evaluations
                                        .iter()
                                }),
                            threshold,
                        )
                    });
                    AlgorithmScores {
                        algorithm: *a,
                        completed: c.len(),
                        failed: *failed,
                        p: mean.as_ref().map(|_| score_p(&r)),
                        r,
                        mean_best: mean.clone().unwrap_or_default(),
                        violations,
                    }
                })
                .collect();
            ProblemScores {
                problem: name,
                budget,
                warmup,
                constrained,
                algorithms,
            }
        })
        .collect();
    ScoreTable {
        violation_threshold: threshold,
        problems,
    }
}

/// Mean, 10th and 90th percentile of the best-so-far curves over
/// repetitions, for every problem, algorithm and evaluation count.
pub fn convergence(records: &[CellRecord], threshold: f64) -> Vec<ConvergenceRow> {
    let mut rows = Vec::new();
    for name in first_seen(records.iter().map(|r| r.problem.clone())) {
        let mine: Vec<&CellRecord> = records.iter().filter(|r| r.problem == name).collect();
        for (a, curves, _) in problem_curves(&mine, threshold) {
            if curves.is_empty() {
                continue;
            }
            for k in 0..curves[0].len() {
                let mut col: Vec<f64> = curves.iter().map(|c| c[k]).collect();
                col.sort_by(f64::total_cmp);
                rows.push(ConvergenceRow {
                    problem: name.clone(),
                    algorithm: a,
                    iteration: k + 1,
                    mean: col.iter().sum::<f64>() / col.len() as f64,
                    p10: quantile(&col, 0.1),
                    p90: quantile(&col, 0.9),
                });
            }
        }
    }
    rows
}

impl ScoreTable {
    /// Mean `p` of each algorithm over the problems it was scored on.
    pub fn overall(&self) -> Vec<(Algorithm, f64)> {
        let algorithms = first_seen(
            self.problems
                .iter()
                .flat_map(|p| p.algorithms.iter().map(|a| a.algorithm)),
        );
        algorithms
            .into_iter()
            .filter_map(|a| {
                let ps: Vec<f64> = self
                    .problems
                    .iter()
                    .flat_map(|p| p.algorithms.iter())
                    .filter(|s| s.algorithm == a)
                    .filter_map(|s| s.p)
                    .collect();
                (!ps.is_empty()).then(|| (a, score_p(&ps)))
            })
            .collect()
    }
}

/// `p_a | feasible% | mean violation` summary of a constrained cell.
pub fn feasibility_row(scores: &AlgorithmScores) -> String {
    let p = scores
        .p
        .map_or_else(|| String::from("-"), |p| alloc::format!("{p:.2}"));
    match scores.violations {
        Some(v) => alloc::format!(
            "{p} | {:.1}% | {:.3e}",
            100.0 * v.feasible_fraction,
            v.mean_violation
        ),
        None => alloc::format!("{p} | - | -"),
    }
}

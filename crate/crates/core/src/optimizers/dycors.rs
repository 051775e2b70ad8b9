//! DYCORS: dynamic coordinate search with a cubic RBF surrogate.

use alloc::vec::Vec;

use rand::RngExt;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::Dataset;
use crate::error::FitError;
use crate::linalg;
use crate::problem::Bounds;
use crate::rng::{self, Rng};
use crate::surrogates::fit_rbf;

/// Cycle of value weights in the trial score.
pub const WEIGHT_CYCLE: [f64; 4] = [0.3, 0.5, 0.8, 0.95];
/// Trial points per input dimension.
pub const TRIALS_PER_DIM: usize = 100;
/// Initial step size as a fraction of the domain width.
pub const INITIAL_STEP: f64 = 0.2;
/// Largest step size as a fraction of the domain width.
pub const MAX_STEP: f64 = 1.0;
/// Consecutive successes that double the step.
pub const SUCCESS_TOLERANCE: usize = 3;
/// Consecutive failures that halve the step.
pub const FAILURE_TOLERANCE: usize = 5;
/// Relative improvement counted as a success.
pub const SUCCESS_THRESHOLD: f64 = 1e-3;

/// Adaptive state of a DYCORS run.
#[derive(Debug, Clone, PartialEq)]
pub struct DycorsState {
    /// Proposals made so far.
    pub iteration: usize,
    /// Proposals available in the run.
    pub max_iterations: usize,
    /// Perturbation standard deviation as a fraction of the domain width.
    pub step_size: f64,
    /// Position in [`WEIGHT_CYCLE`].
    pub weight_cycle_index: usize,
    /// Consecutive successes.
    pub success_count: usize,
    /// Consecutive failures.
    pub fail_count: usize,
    initial_step: f64,
}

impl DycorsState {
    /// Fresh state for `max_iterations` proposals.
    pub fn new(max_iterations: usize) -> Self {
        Self {
            iteration: 0,
            max_iterations,
            step_size: INITIAL_STEP,
            weight_cycle_index: 0,
            success_count: 0,
            fail_count: 0,
            initial_step: INITIAL_STEP,
        }
    }

    /// Probability of perturbing each coordinate:
    /// `min(20/n, 1) (1 - ln(k + 1) / ln(K))`.
    pub fn p_select(&self, dim: usize) -> f64 {
        let base = (20.0 / dim as f64).min(1.0);
        if self.max_iterations <= 1 {
            return base;
        }
        let decay =
            1.0 - libm::log((self.iteration + 1) as f64) / libm::log(self.max_iterations as f64);
        base * decay.clamp(0.0, 1.0)
    }

    /// Current value weight.
    pub fn weight(&self) -> f64 {
        WEIGHT_CYCLE[self.weight_cycle_index % WEIGHT_CYCLE.len()]
    }

    /// Smallest step size.
    pub fn min_step(&self) -> f64 {
        1e-3 * self.initial_step
    }

    /// Account for one evaluated proposal; `improved` means it beat the
    /// incumbent by more than the success threshold.
    pub fn record(&mut self, improved: bool) {
        self.iteration = (self.iteration + 1).min(self.max_iterations);
        self.weight_cycle_index = (self.weight_cycle_index + 1) % WEIGHT_CYCLE.len();
        if improved {
            self.success_count += 1;
            self.fail_count = 0;
        } else {
            self.fail_count += 1;
            self.success_count = 0;
        }
        if self.success_count >= SUCCESS_TOLERANCE {
            self.step_size = (self.step_size * 2.0).min(MAX_STEP);
            self.success_count = 0;
        }
        if self.fail_count >= FAILURE_TOLERANCE {
            self.step_size = (self.step_size * 0.5).max(self.min_step());
            self.fail_count = 0;
        }
    }
}

/// Whether `new` improves on `best` by more than the success threshold.
pub fn is_success(new: f64, best: f64) -> bool {
    new < best - SUCCESS_THRESHOLD * best.abs()
}

/// Trial points around `incumbent`; every trial perturbs at least one coordinate.
pub fn perturbation_trials(
    incumbent: &[f64],
    bounds: &Bounds,
    state: &DycorsState,
    n: usize,
    rng: &mut Rng,
) -> Vec<Vec<f64>> {
    let dim = incumbent.len();
    let p = state.p_select(dim);
    (0..n)
        .map(|_| {
            let mut mask: Vec<bool> = (0..dim).map(|_| rng.random::<f64>() < p).collect();
            if !mask.iter().any(|m| *m) {
                mask[rng.random_range(0..dim)] = true;
            }
            let mut x = incumbent.to_vec();
            for j in 0..dim {
                if mask[j] {
                    let z: f64 = StandardNormal.sample(rng);
                    x[j] += state.step_size * bounds.width(j) * z;
                }
            }
            bounds.clip(&mut x);
            x
        })
        .collect()
}

fn min_max_scale(v: &[f64]) -> Vec<f64> {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        v.iter().map(|x| (x - lo) / (hi - lo)).collect()
    } else {
        alloc::vec![1.0; v.len()]
    }
}

/// Index of the trial of least `w V_f + (1 - w)(1 - V_d)`, with `V_f` and
/// `V_d` min-max scaled predictions and distances. Ties keep the first.
pub fn select_by_score(predictions: &[f64], distances: &[f64], weight: f64) -> usize {
    let vf = min_max_scale(predictions);
    let vd = min_max_scale(distances);
    let mut best = (0, f64::INFINITY);
    for i in 0..vf.len() {
        let s = weight * vf[i] + (1.0 - weight) * (1.0 - vd[i]);
        if s < best.1 {
            best = (i, s);
        }
    }
    best.0
}

/// Best-scoring perturbation of `incumbent` under an RBF fitted to `data`.
pub fn dycors_step(
    data: &Dataset,
    bounds: &Bounds,
    state: &DycorsState,
    incumbent: &[f64],
    seed: u64,
) -> Result<Vec<f64>, FitError> {
    let model = fit_rbf(data)?;
    let mut r = rng::from_seed(seed);
    let trials = perturbation_trials(
        incumbent,
        bounds,
        state,
        TRIALS_PER_DIM * incumbent.len(),
        &mut r,
    );
    let pred = model.predict_many(&trials);
    let dist: Vec<f64> = trials
        .iter()
        .map(|t| {
            data.inputs()
                .iter()
                .map(|x| linalg::dist(t, x))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let i = select_by_score(&pred, &dist, state.weight());
    Ok(trials[i].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::latin_hypercube;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn p_select_starts_at_full_probability_in_2d() {
        let s = DycorsState::new(50);
        assert_eq!(s.p_select(2), 1.0);
        assert_eq!(s.p_select(40), 0.5);
        let mut late = s.clone();
        late.iteration = 49;
        assert_eq!(late.p_select(2), 0.0);
    }

    #[test]
    fn p_select_decreases() {
        let mut s = DycorsState::new(100);
        let mut last = f64::INFINITY;
        for k in 0..100 {
            s.iteration = k;
            let p = s.p_select(5);
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn score_selection_example() {
        assert_eq!(select_by_score(&[0.0, 1.0], &[1.0, 0.0], 0.95), 0);
        // distance dominates at low weight
        assert_eq!(select_by_score(&[0.0, 0.1], &[0.0, 1.0], 0.3), 1);
    }

    #[test]
    fn step_size_rule() {
        let mut s = DycorsState::new(100);
        for _ in 0..3 {
            s.record(true);
        }
        assert_eq!(s.step_size, 0.4);
        for _ in 0..5 {
            s.record(false);
        }
        assert_eq!(s.step_size, 0.2);
        for _ in 0..200 {
            s.record(false);
        }
        assert_eq!(s.step_size, 2e-4);
        for _ in 0..60 {
            s.record(true);
        }
        assert_eq!(s.step_size, 1.0);
    }

    #[test]
    fn interrupted_streaks_do_not_count() {
        let mut s = DycorsState::new(100);
        s.record(true);
        s.record(true);
        s.record(false);
        s.record(true);
        assert_eq!(s.step_size, 0.2);
    }

    #[test]
    fn weights_cycle() {
        let mut s = DycorsState::new(10);
        let w: Vec<f64> = (0..5)
            .map(|_| {
                let w = s.weight();
                s.record(false);
                w
            })
            .collect();
        assert_eq!(w, vec![0.3, 0.5, 0.8, 0.95, 0.3]);
    }

    #[test]
    fn success_threshold() {
        assert!(is_success(0.99, 1.0));
        assert!(!is_success(0.9995, 1.0));
        assert!(is_success(-1.01, -1.0));
    }

    #[test]
    fn step_is_deterministic_and_inside() {
        let b = Bounds::uniform(3, -5.0, 5.0).unwrap();
        let xs = latin_hypercube(&b, 10, 1).unwrap();
        let ys = xs.iter().map(|x| x.iter().map(|v| v * v).sum()).collect();
        let d = Dataset::from_rows(xs, ys);
        let inc = d.input(d.argmin().unwrap()).to_vec();
        let s = DycorsState::new(40);
        let a = dycors_step(&d, &b, &s, &inc, 4).unwrap();
        assert_eq!(a, dycors_step(&d, &b, &s, &inc, 4).unwrap());
        assert!(b.contains(&a));
        assert_ne!(a, inc);
    }

    proptest! {
        #[test]
        fn every_trial_moves_a_coordinate(seed in 0u64..1000, dim in 1usize..12, it in 0usize..60) {
            let b = Bounds::uniform(dim, -1.0, 1.0).unwrap();
            let inc = vec![0.0; dim];
            let mut s = DycorsState::new(60);
            s.iteration = it;
            let mut r = rng::from_seed(seed);
            for t in perturbation_trials(&inc, &b, &s, 50, &mut r) {
                prop_assert!(t.iter().any(|v| *v != 0.0));
                prop_assert!(b.contains(&t));
            }
        }
    }
}

//! Algorithm registry and the budgeted run loop.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use rand::RngExt;
use serde::{Deserialize, Serialize};

use super::bo::{constrained_incumbent, propose_bo, propose_cbo, AcquisitionConfig};
use super::cobyla::{cobyla_step, regular_simplex, Simplex};
use super::dycors::{dycors_step, is_success, perturbation_trials, DycorsState};
use super::quadratic_tr::{cobyqa_step, cuatro_step, lsqm_step, Step};
use super::search::{random_point, SearchConfig};
use super::trust_region::{trust_region_update, MeritConfig, RadiusConfig, TrustRegionState};
use crate::dataset::Dataset;
use crate::error::{ConfigError, EvalError, FitError};
use crate::evaluation::{Evaluator, Fallback, RunStatus, Trajectory};
use crate::problem::{Bounds, Problem};
use crate::problems::VIOLATION_THRESHOLD;
use crate::rng::{self, Stream};
use crate::sampling::latin_hypercube_with;
use crate::surrogates::NoiseMode;

/// The optimizers of the comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// GP + lower confidence bound.
    Bo,
    /// GP + LCB with constraint GPs.
    Cbo,
    /// PSD quadratic trust region.
    Lsqm,
    /// PSD quadratic trust region with quadratic constraint surrogates.
    Cuatro,
    /// Linear simplex trust region.
    Cobyla,
    /// Local quadratic trust region with a penalty merit.
    Cobyqa,
    /// RBF-guided coordinate perturbation.
    Dycors,
}

impl Algorithm {
    /// Every algorithm, in report order.
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Bo,
        Algorithm::Cbo,
        Algorithm::Lsqm,
        Algorithm::Cuatro,
        Algorithm::Cobyla,
        Algorithm::Cobyqa,
        Algorithm::Dycors,
    ];

    /// Registry tag.
    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Bo => "bo",
            Algorithm::Cbo => "cbo",
            Algorithm::Lsqm => "lsqm",
            Algorithm::Cuatro => "cuatro",
            Algorithm::Cobyla => "cobyla",
            Algorithm::Cobyqa => "cobyqa",
            Algorithm::Dycors => "dycors",
        }
    }

    /// Parse a registry tag.
    pub fn from_tag(tag: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .iter()
            .copied()
            .find(|a| a.tag() == tag)
            .ok_or_else(|| ConfigError::UnknownKey {
                kind: "algorithm",
                key: tag.to_string(),
            })
    }

    /// Runs on problems without constraints.
    pub fn supports_unconstrained(self) -> bool {
        self != Algorithm::Cbo
    }

    /// Runs on problems with constraints.
    pub fn supports_constraints(self) -> bool {
        matches!(
            self,
            Algorithm::Cbo | Algorithm::Cuatro | Algorithm::Cobyla | Algorithm::Cobyqa
        )
    }

    /// Whether the algorithm applies to `problem`.
    pub fn supports(self, problem: &Problem) -> bool {
        if problem.is_constrained() {
            self.supports_constraints()
        } else {
            self.supports_unconstrained()
        }
    }

    /// Size of the Latin hypercube initial design in `dim` dimensions.
    pub fn initial_design_size(self, dim: usize) -> usize {
        match self {
            Algorithm::Bo | Algorithm::Cbo | Algorithm::Dycors => (2 * dim).max(5),
            _ => dim + 1,
        }
    }
}

impl core::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Tunables shared by all optimizers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// BO and CBO acquisition. The objective noise mode is switched to
    /// [`NoiseMode::Estimated`] on noisy problems.
    pub acquisition: AcquisitionConfig,
    /// Inner search of the trust-region methods.
    pub search: SearchConfig,
    /// Trust-region radii, as fractions of the unit-cube width.
    pub radius: RadiusConfig,
    /// Constraint values up to this are treated as satisfied.
    pub violation_threshold: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            acquisition: AcquisitionConfig::default(),
            search: SearchConfig::default(),
            radius: RadiusConfig::default(),
            violation_threshold: VIOLATION_THRESHOLD,
        }
    }
}

/// Run `algorithm` on `problem` for exactly `budget` evaluations with the
/// default configuration.
pub fn run_optimizer(
    algorithm: Algorithm,
    problem: &Problem,
    budget: usize,
    seed: u64,
) -> Result<Trajectory, ConfigError> {
    run_optimizer_with(
        algorithm,
        problem,
        budget,
        seed,
        &OptimizerConfig::default(),
    )
}

/// [`run_optimizer`] with explicit settings.
///
/// A step whose surrogate cannot be fitted is replaced by a uniform random
/// point and recorded in [`Trajectory::fallbacks`]. A non-finite objective
/// ends the run with [`RunStatus::Failed`].
pub fn run_optimizer_with(
    algorithm: Algorithm,
    problem: &Problem,
    budget: usize,
    seed: u64,
    cfg: &OptimizerConfig,
) -> Result<Trajectory, ConfigError> {
    if !algorithm.supports(problem) {
        return Err(ConfigError::Invalid(format!(
            "{} does not handle {} problems",
            algorithm,
            if problem.is_constrained() {
                "constrained"
            } else {
                "unconstrained"
            }
        )));
    }
    let dim = problem.dim();
    let initial = algorithm.initial_design_size(dim);
    if budget < initial {
        return Err(ConfigError::BudgetTooSmall { budget, initial });
    }
    let unit = Bounds::unit(dim);
    let mut run = Run {
        problem,
        evaluator: Evaluator::new(problem, budget, seed),
        trajectory: Trajectory::new(budget, seed),
        data: Dataset::new(),
    };
    let design = latin_hypercube_with(&unit, initial, &mut rng::stream(seed, Stream::Sampler))?;
    for z in design {
        if run.evaluate(z).is_err() {
            return Ok(run.trajectory);
        }
    }
    let mut strategy = build(algorithm, problem, &run.data, cfg, budget - initial);
    let mut opt_rng = rng::stream(seed, Stream::Optimizer);
    while run.trajectory.len() < budget {
        let step_seed: u64 = opt_rng.random();
        let (mut z, own) = match strategy.propose(&run.data, &unit, step_seed) {
            Ok(z) => (z, true),
            Err(e) => {
                let index = run.trajectory.len() + 1;
                log::warn!("{algorithm}: step {index} replaced by a random point ({e})");
                run.trajectory.fallbacks.push(Fallback {
                    index,
                    reason: e.to_string(),
                });
                (random_point(&unit, &mut opt_rng), false)
            }
        };
        unit.clip(&mut z);
        let Ok((y, g)) = run.evaluate(z.clone()) else {
            break;
        };
        strategy.observe(&run.data, &z, y, &g, own);
    }
    Ok(run.trajectory)
}

struct Run<'a> {
    problem: &'a Problem,
    evaluator: Evaluator<'a>,
    trajectory: Trajectory,
    data: Dataset,
}

impl Run<'_> {
    fn evaluate(&mut self, z: Vec<f64>) -> Result<(f64, Vec<f64>), EvalError> {
        let x = self.problem.bounds().from_unit(&z);
        match self.evaluator.evaluate(&x) {
            Ok(e) => {
                let out = (e.y, e.g.clone());
                self.data.push(z, e.y, &e.g);
                self.trajectory.evaluations.push(e);
                Ok(out)
            }
            Err(e) => {
                log::error!("run stopped: {e}");
                self.trajectory.status = RunStatus::Failed {
                    reason: e.to_string(),
                };
                Err(e)
            }
        }
    }
}

trait Strategy {
    fn propose(&mut self, data: &Dataset, unit: &Bounds, seed: u64) -> Result<Vec<f64>, FitError>;
    fn observe(&mut self, data: &Dataset, x: &[f64], y: f64, g: &[f64], own: bool);
}

fn build(
    algorithm: Algorithm,
    problem: &Problem,
    data: &Dataset,
    cfg: &OptimizerConfig,
    iterations: usize,
) -> alloc::boxed::Box<dyn Strategy> {
    use alloc::boxed::Box;
    let mut acquisition = cfg.acquisition;
    if problem.noise().is_noisy() {
        acquisition.noise = NoiseMode::Estimated;
    }
    match algorithm {
        Algorithm::Bo | Algorithm::Cbo => Box::new(BoStrategy {
            cfg: acquisition,
            constrained: algorithm == Algorithm::Cbo,
        }),
        Algorithm::Dycors => Box::new(DycorsStrategy {
            state: DycorsState::new(iterations),
            best: data.targets().iter().copied().fold(f64::INFINITY, f64::min),
        }),
        Algorithm::Cobyla => Box::new(CobylaStrategy::new(data, cfg)),
        Algorithm::Lsqm | Algorithm::Cuatro | Algorithm::Cobyqa => {
            Box::new(QuadraticStrategy::new(algorithm, data, cfg))
        }
    }
}

struct BoStrategy {
    cfg: AcquisitionConfig,
    constrained: bool,
}

impl Strategy for BoStrategy {
    fn propose(&mut self, data: &Dataset, unit: &Bounds, seed: u64) -> Result<Vec<f64>, FitError> {
        if self.constrained {
            propose_cbo(data, unit, &self.cfg, seed)
        } else {
            propose_bo(data, unit, &self.cfg, seed)
        }
    }

    fn observe(&mut self, _: &Dataset, _: &[f64], _: f64, _: &[f64], _: bool) {}
}

struct DycorsStrategy {
    state: DycorsState,
    best: f64,
}

impl Strategy for DycorsStrategy {
    fn propose(&mut self, data: &Dataset, unit: &Bounds, seed: u64) -> Result<Vec<f64>, FitError> {
        let incumbent = data.input(data.argmin().expect("initial design evaluated"));
        match dycors_step(data, unit, &self.state, incumbent, seed) {
            Ok(x) => Ok(x),
            Err(e) => {
                log::warn!("dycors: RBF fit failed ({e}); random perturbation");
                let mut r = rng::from_seed(seed);
                Ok(perturbation_trials(incumbent, unit, &self.state, 1, &mut r).remove(0))
            }
        }
    }

    fn observe(&mut self, _: &Dataset, _: &[f64], y: f64, _: &[f64], _: bool) {
        self.state.record(is_success(y, self.best));
        self.best = self.best.min(y);
    }
}

/// Incumbent of a trust-region method and the penalty bookkeeping.
struct Center {
    tr: TrustRegionState,
    f: f64,
    g: Vec<f64>,
    merit: MeritConfig,
    threshold: f64,
    use_max_merit: bool,
}

impl Center {
    fn new(data: &Dataset, cfg: &OptimizerConfig, use_max_merit: bool) -> Self {
        let i = constrained_incumbent(data).expect("initial design evaluated");
        let merit = MeritConfig::new(data.n_constraints());
        let (f, g) = (data.targets()[i], data.constraint_row(i).to_vec());
        let mut c = Self {
            tr: TrustRegionState::new(data.input(i).to_vec(), 0.0, &cfg.radius, 1.0),
            f,
            g,
            merit,
            threshold: cfg.violation_threshold,
            use_max_merit,
        };
        c.tr.center_merit = c.value(f, &c.g.clone());
        c
    }

    fn value(&self, f: f64, g: &[f64]) -> f64 {
        if self.use_max_merit {
            self.merit.max_merit(f, g)
        } else {
            self.merit.sum_merit(f, g)
        }
    }

    fn feasible(&self, g: &[f64]) -> bool {
        g.iter().all(|v| *v <= self.threshold)
    }

    /// Trust-region update after evaluating the proposal of `step`.
    /// Returns the actual reduction.
    fn update(&mut self, step: &Step, x: &[f64], y: f64, g: &[f64]) -> f64 {
        if self.merit.grow(g, self.threshold) {
            self.tr.center_merit = self.value(self.f, &self.g);
        }
        let m = self.value(y, g);
        let actual = self.tr.center_merit - m;
        let acceptable = self.feasible(g) || !self.feasible(&self.g);
        let candidate = acceptable.then_some((x, m));
        let before = self.tr.success_count;
        self.tr = trust_region_update(
            &self.tr,
            step.predicted_reduction,
            actual,
            step.on_boundary,
            candidate,
        );
        if self.tr.success_count > before {
            self.f = y;
            self.g = g.to_vec();
        }
        if step.surrogate_infeasible {
            self.tr.shrink();
        }
        actual
    }

    /// Move the center without touching the radius.
    fn offer(&mut self, x: &[f64], y: f64, g: &[f64]) {
        let m = self.value(y, g);
        if m < self.tr.center_merit && (self.feasible(g) || !self.feasible(&self.g)) {
            self.tr.center = x.to_vec();
            self.tr.center_merit = m;
            self.f = y;
            self.g = g.to_vec();
        }
    }
}

struct QuadraticStrategy {
    algorithm: Algorithm,
    center: Center,
    search: SearchConfig,
    pending: Option<Step>,
}

impl QuadraticStrategy {
    fn new(algorithm: Algorithm, data: &Dataset, cfg: &OptimizerConfig) -> Self {
        Self {
            algorithm,
            center: Center::new(data, cfg, false),
            search: cfg.search,
            pending: None,
        }
    }
}

impl Strategy for QuadraticStrategy {
    fn propose(&mut self, data: &Dataset, unit: &Bounds, seed: u64) -> Result<Vec<f64>, FitError> {
        let c = &self.center;
        let step = match self.algorithm {
            Algorithm::Lsqm => lsqm_step(data, unit, &c.tr, &self.search, seed),
            Algorithm::Cuatro => cuatro_step(data, unit, &c.tr, &c.merit, &self.search, seed),
            _ => cobyqa_step(data, unit, &c.tr, &c.merit, &self.search, seed),
        };
        match step {
            Ok(s) => {
                let x = s.x.clone();
                self.pending = Some(s);
                Ok(x)
            }
            Err(e) => {
                self.center.tr.shrink();
                self.pending = None;
                Err(e)
            }
        }
    }

    fn observe(&mut self, _: &Dataset, x: &[f64], y: f64, g: &[f64], own: bool) {
        match self.pending.take() {
            Some(step) if own => {
                self.center.update(&step, x, y, g);
            }
            _ => self.center.offer(x, y, g),
        }
    }
}

struct CobylaStrategy {
    center: Center,
    simplex: Simplex,
    search: SearchConfig,
    pending: Option<Step>,
    /// Geometry points still to be evaluated.
    queue: VecDeque<Vec<f64>>,
    /// Simplex being rebuilt from the queued points.
    rebuild: Option<Simplex>,
}

impl CobylaStrategy {
    fn new(data: &Dataset, cfg: &OptimizerConfig) -> Self {
        let center = Center::new(data, cfg, true);
        let simplex = Simplex::from_dataset(data);
        let mut s = Self {
            center,
            simplex,
            search: cfg.search,
            pending: None,
            queue: VecDeque::new(),
            rebuild: None,
        };
        if s.simplex.is_degenerate() {
            s.start_rebuild(&Bounds::unit(data.dim()));
        }
        s
    }

    fn start_rebuild(&mut self, unit: &Bounds) {
        let c = &self.center;
        let edge = (0.5 * c.tr.radius).max(c.tr.min_radius);
        self.queue = regular_simplex(&c.tr.center, edge, unit).into();
        self.rebuild = Some(Simplex {
            vertices: alloc::vec![c.tr.center.clone()],
            values: alloc::vec![c.f],
            constraints: alloc::vec![c.g.clone()],
        });
    }
}

impl Strategy for CobylaStrategy {
    fn propose(&mut self, _: &Dataset, unit: &Bounds, seed: u64) -> Result<Vec<f64>, FitError> {
        if let Some(x) = self.queue.pop_front() {
            self.pending = None;
            return Ok(x);
        }
        let c = &self.center;
        match cobyla_step(
            &self.simplex.dataset(),
            unit,
            &c.tr,
            &c.merit,
            &self.search,
            seed,
        ) {
            Ok(s) => {
                let x = s.x.clone();
                self.pending = Some(s);
                Ok(x)
            }
            Err(e) => {
                log::warn!("cobyla: simplex fit failed ({e}); rebuilding");
                self.center.tr.shrink();
                self.start_rebuild(unit);
                self.pending = None;
                Ok(self.queue.pop_front().expect("rebuild queues n_x points"))
            }
        }
    }

    fn observe(&mut self, data: &Dataset, x: &[f64], y: f64, g: &[f64], own: bool) {
        let unit = Bounds::unit(data.dim());
        match self.pending.take() {
            Some(step) if own => {
                let actual = self.center.update(&step, x, y, g);
                self.simplex
                    .replace_worst(x.to_vec(), y, g.to_vec(), &self.center.merit);
                let spread = self.simplex.diameter() > 2.0 * self.center.tr.radius;
                if self.simplex.is_degenerate() || (!(actual > 0.0) && spread) {
                    self.start_rebuild(&unit);
                }
            }
            _ => {
                if let Some(r) = self.rebuild.as_mut().filter(|_| own) {
                    r.vertices.push(x.to_vec());
                    r.values.push(y);
                    r.constraints.push(g.to_vec());
                    if self.queue.is_empty() {
                        self.simplex = self.rebuild.take().expect("checked");
                    }
                }
                self.center.offer(x, y, g);
            }
        }
    }
}

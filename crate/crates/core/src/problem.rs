use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Axis-aligned box `lower[i] < upper[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    /// Checked constructor.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, ConfigError> {
        if lower.len() != upper.len() {
            return Err(ConfigError::Bounds(format!(
                "lower has {} entries, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.is_empty() {
            return Err(ConfigError::Bounds("zero-dimensional box".into()));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(ConfigError::Bounds(format!(
                    "dimension {i}: lower {l} must be finite and below upper {u}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval `[lower, upper]` in every one of `dim` dimensions.
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self, ConfigError> {
        Self::new(alloc::vec![lower; dim], alloc::vec![upper; dim])
    }

    /// The unit cube `[0, 1]^dim`.
    pub fn unit(dim: usize) -> Self {
        Self::uniform(dim, 0.0, 1.0).expect("unit cube is valid")
    }

    /// Number of dimensions.
    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Lower corner.
    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    /// Upper corner.
    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// `upper[i] - lower[i]`.
    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    /// Largest edge length of the box.
    pub fn max_width(&self) -> f64 {
        (0..self.dim()).map(|i| self.width(i)).fold(0.0, f64::max)
    }

    /// Whether `x` lies in the closed box.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *v >= *l && *v <= *u)
    }

    /// Componentwise projection onto the box. NaN components map to the lower bound.
    pub fn clip(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            let (l, u) = (self.lower[i], self.upper[i]);
            *v = if v.is_nan() { l } else { v.clamp(l, u) };
        }
    }

    /// Clipped copy of `x`.
    pub fn clipped(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        self.clip(&mut y);
        y
    }

    /// Map a point of the box to the unit cube.
    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, v)| (v - self.lower[i]) / self.width(i))
            .collect()
    }

    /// Map a point of the unit cube to the box.
    pub fn from_unit(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .enumerate()
            .map(|(i, v)| self.lower[i] + v * self.width(i))
            .collect()
    }
}

/// Additive Gaussian observation noise.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Standard deviation of the noise on the objective.
    pub sigma: f64,
    /// Apply the same noise level to constraint observations. Off by default.
    #[serde(default)]
    pub constraint_noise: bool,
}

impl NoiseSpec {
    /// Noise-free evaluation.
    pub const NONE: NoiseSpec = NoiseSpec {
        sigma: 0.0,
        constraint_noise: false,
    };

    /// Objective noise with standard deviation `sigma`.
    pub fn gaussian(sigma: f64) -> Self {
        Self {
            sigma,
            constraint_noise: false,
        }
    }

    /// Whether any noise is added.
    pub fn is_noisy(&self) -> bool {
        self.sigma > 0.0
    }
}

/// Location and value of a known global minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownOptimum {
    /// Minimizer.
    pub x: Vec<f64>,
    /// Minimum value.
    pub value: f64,
}

/// Noise-free black-box function. `g(x) <= 0` means feasible.
pub trait BlackBox: Send + Sync {
    /// Objective value and constraint values at `x`.
    fn evaluate(&self, x: &[f64]) -> (f64, Vec<f64>);
}

struct FnBox<F>(F);

impl<F> BlackBox for FnBox<F>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>) + Send + Sync,
{
    fn evaluate(&self, x: &[f64]) -> (f64, Vec<f64>) {
        (self.0)(x)
    }
}

/// A box-bounded, possibly constrained and noisy, black-box minimization problem.
#[derive(Clone)]
pub struct Problem {
    name: String,
    bounds: Bounds,
    n_constraints: usize,
    noise: NoiseSpec,
    known_optimum: Option<KnownOptimum>,
    func: Arc<dyn BlackBox>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("n_constraints", &self.n_constraints)
            .field("noise", &self.noise)
            .finish_non_exhaustive()
    }
}

impl Problem {
    /// Unconstrained, noise-free problem.
    pub fn new(name: impl Into<String>, bounds: Bounds, func: Arc<dyn BlackBox>) -> Self {
        Self {
            name: name.into(),
            bounds,
            n_constraints: 0,
            noise: NoiseSpec::NONE,
            known_optimum: None,
            func,
        }
    }

    /// Unconstrained problem from a closure.
    pub fn from_fn<F>(name: impl Into<String>, bounds: Bounds, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let func: Box<dyn BlackBox> = Box::new(FnBox(move |x: &[f64]| (f(x), Vec::new())));
        Self::new(name, bounds, Arc::from(func))
    }

    /// Constrained problem from a closure returning `(f, g)`.
    pub fn from_constrained_fn<F>(
        name: impl Into<String>,
        bounds: Bounds,
        n_constraints: usize,
        f: F,
    ) -> Self
    where
        F: Fn(&[f64]) -> (f64, Vec<f64>) + Send + Sync + 'static,
    {
        let func: Box<dyn BlackBox> = Box::new(FnBox(f));
        Self::new(name, bounds, Arc::from(func)).with_constraints(n_constraints)
    }

    /// Declare the number of constraints returned by the black box.
    pub fn with_constraints(mut self, n_constraints: usize) -> Self {
        self.n_constraints = n_constraints;
        self
    }

    /// Set the observation noise.
    pub fn with_noise(mut self, noise: NoiseSpec) -> Self {
        self.noise = noise;
        self
    }

    /// Attach a known optimum; it must lie inside the bounds.
    pub fn with_known_optimum(mut self, optimum: KnownOptimum) -> Result<Self, ConfigError> {
        if !self.bounds.contains(&optimum.x) {
            return Err(ConfigError::Invalid(format!(
                "known optimum of `{}` lies outside the bounds",
                self.name
            )));
        }
        self.known_optimum = Some(optimum);
        Ok(self)
    }

    /// Registry name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Input dimension `n_x`.
    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    /// Search box.
    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    /// Number of inequality constraints `n_g`.
    pub fn n_constraints(&self) -> usize {
        self.n_constraints
    }

    /// Whether the problem has constraints.
    pub fn is_constrained(&self) -> bool {
        self.n_constraints > 0
    }

    /// Observation noise.
    pub fn noise(&self) -> NoiseSpec {
        self.noise
    }

    /// Known optimum, if any.
    pub fn known_optimum(&self) -> Option<&KnownOptimum> {
        self.known_optimum.as_ref()
    }

    /// Noise-free evaluation of the black box.
    pub fn evaluate_exact(&self, x: &[f64]) -> (f64, Vec<f64>) {
        self.func.evaluate(x)
    }
}

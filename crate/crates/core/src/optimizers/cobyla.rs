//! COBYLA: linear interpolation on a simplex, minimized over half the
//! trust-region radius under a max-violation merit.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::quadratic_tr::{on_boundary, Step};
use super::search::{
    linear_ball_step, linear_halfspace_candidates, minimize, Region, SearchConfig,
};
use super::trust_region::{MeritConfig, TrustRegionState};
use crate::dataset::Dataset;
use crate::error::FitError;
use crate::linalg;
use crate::problem::Bounds;
use crate::rng;
use crate::surrogates::fit_linear;

/// Edge-matrix condition number above which the simplex is rebuilt.
pub const DEGENERACY_CONDITION: f64 = 1e8;

/// Interpolation simplex with the observations at its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    /// `n_x + 1` vertices.
    pub vertices: Vec<Vec<f64>>,
    /// Objective at each vertex.
    pub values: Vec<f64>,
    /// Constraints at each vertex.
    pub constraints: Vec<Vec<f64>>,
}

impl Simplex {
    /// Simplex made of the given samples.
    pub fn from_dataset(data: &Dataset) -> Self {
        Self {
            vertices: data.inputs().to_vec(),
            values: data.targets().to_vec(),
            constraints: (0..data.len())
                .map(|i| data.constraint_row(i).to_vec())
                .collect(),
        }
    }

    /// The vertices as a dataset.
    pub fn dataset(&self) -> Dataset {
        let d = Dataset::from_rows(self.vertices.clone(), self.values.clone());
        if self.constraints.iter().any(|g| !g.is_empty()) {
            d.with_constraints(self.constraints.clone())
        } else {
            d
        }
    }

    fn merits(&self, merit: &MeritConfig) -> impl Iterator<Item = f64> + '_ {
        let m = merit.clone();
        self.values
            .iter()
            .zip(&self.constraints)
            .map(move |(f, g)| m.max_merit(*f, g))
    }

    /// Vertex of least merit.
    pub fn best(&self, merit: &MeritConfig) -> usize {
        let m: Vec<f64> = self.merits(merit).collect();
        (0..m.len())
            .min_by(|a, b| m[*a].total_cmp(&m[*b]))
            .unwrap_or(0)
    }

    /// Replace the vertex of largest merit.
    pub fn replace_worst(&mut self, x: Vec<f64>, y: f64, g: Vec<f64>, merit: &MeritConfig) {
        let m: Vec<f64> = self.merits(merit).collect();
        let worst = (0..m.len())
            .max_by(|a, b| m[*a].total_cmp(&m[*b]))
            .unwrap_or(0);
        self.vertices[worst] = x;
        self.values[worst] = y;
        self.constraints[worst] = g;
    }

    /// Condition number of the edge matrix `v_i - v_0`.
    pub fn condition(&self) -> f64 {
        let n = self.vertices.len().saturating_sub(1);
        if n == 0 {
            return f64::INFINITY;
        }
        let v0 = &self.vertices[0];
        let e = DMatrix::from_fn(n, v0.len(), |i, j| self.vertices[i + 1][j] - v0[j]);
        linalg::condition_number(&e)
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.vertices.len() {
            for j in 0..i {
                d = d.max(linalg::dist(&self.vertices[i], &self.vertices[j]));
            }
        }
        d
    }

    /// Whether the simplex has to be rebuilt.
    pub fn is_degenerate(&self) -> bool {
        !(self.condition() <= DEGENERACY_CONDITION)
    }
}

/// The `n_x` vertices besides `center` of a regular simplex with edge
/// `edge`. A vertex leaving the box is reflected through the center
/// coordinatewise, then clipped.
pub fn regular_simplex(center: &[f64], edge: f64, bounds: &Bounds) -> Vec<Vec<f64>> {
    let n = center.len();
    let nf = n as f64;
    // u_i = e_i + c 1 has |u_i| = |u_i - u_j| = sqrt(2)
    let c = (libm::sqrt(nf + 1.0) - 1.0) / nf;
    let s = edge / core::f64::consts::SQRT_2;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let u = s * (c + if i == j { 1.0 } else { 0.0 });
                    let (lo, hi) = (bounds.lower()[j], bounds.upper()[j]);
                    let v = center[j] + u;
                    let v = if v > hi || v < lo { center[j] - u } else { v };
                    v.clamp(lo, hi)
                })
                .collect()
        })
        .collect()
}

/// Minimize `f + rho [max_i c_i]_+` of the simplex interpolants over
/// `ball(center, radius / 2) ∩ box`.
pub fn cobyla_step(
    simplex: &Dataset,
    bounds: &Bounds,
    tr: &TrustRegionState,
    merit: &MeritConfig,
    search: &SearchConfig,
    seed: u64,
) -> Result<Step, FitError> {
    let needed = simplex.dim() + 1;
    if simplex.len() < needed {
        return Err(FitError::TooFewSamples {
            needed,
            got: simplex.len(),
        });
    }
    let f = fit_linear(simplex, 0.0)?;
    let cs = (0..simplex.n_constraints())
        .map(|j| fit_linear(&simplex.with_targets(simplex.constraint_column(j)), 0.0))
        .collect::<Result<Vec<_>, _>>()?;
    let radius = 0.5 * tr.radius;
    let center = &tr.center;
    let model_merit = |x: &[f64]| {
        let c: Vec<f64> = cs.iter().map(|m| m.predict(x)).collect();
        merit.max_merit(f.predict(x), &c)
    };
    let mut extra = alloc::vec![linear_ball_step(&f.gradient, center, radius)];
    for m in &cs {
        extra.extend(linear_halfspace_candidates(
            &f.gradient,
            &m.gradient,
            m.predict(center),
            center,
            radius,
        ));
    }
    let region = Region {
        bounds,
        center,
        radius,
    };
    let cfg = SearchConfig {
        random_directions: true,
        ..*search
    };
    let mut r = rng::from_seed(seed);
    let (x, v) = minimize(&model_merit, &region, &extra, &cfg, &mut r);
    let surrogate_infeasible = !cs.is_empty() && cs.iter().all(|m| m.predict(&x) > 0.0);
    Ok(Step {
        predicted_reduction: model_merit(center) - v,
        on_boundary: on_boundary(&x, center, radius),
        surrogate_infeasible,
        x,
    })
}

//! Quadratic-model trust-region steps: LSQM, CUATRO and COBYQA.
//!
//! All three minimize a quadratic surrogate (plus a penalty on quadratic
//! constraint surrogates) over `ball(center, radius) ∩ box`. They differ in
//! how the surrogates are fitted:
//!
//! * LSQM: one PSD-projected least-squares quadratic on all data.
//! * CUATRO: PSD-projected quadratics for the objective and every
//!   constraint, on all data.
//! * COBYQA: unprojected quadratics on the `(n+1)(n+2)/2` samples closest to
//!   the center.

use alloc::vec::Vec;

use super::search::{minimize, quadratic_ball_step, Region, SearchConfig};
use super::trust_region::{MeritConfig, TrustRegionState};
use crate::dataset::Dataset;
use crate::error::FitError;
use crate::linalg;
use crate::problem::Bounds;
use crate::rng;
use crate::surrogates::quadratic::n_coefficients;
use crate::surrogates::{fit_quadratic, QuadFit, QuadModel};

/// A trust-region proposal.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    /// Proposed point.
    pub x: Vec<f64>,
    /// Surrogate merit at the center minus at `x`.
    pub predicted_reduction: f64,
    /// Whether `x` lies on the trust-region sphere.
    pub on_boundary: bool,
    /// Every constraint surrogate is positive at `x`.
    pub surrogate_infeasible: bool,
}

/// Relative tolerance of the on-boundary test.
const BOUNDARY_TOL: f64 = 1e-6;

pub(crate) fn on_boundary(x: &[f64], center: &[f64], radius: f64) -> bool {
    radius.is_finite() && linalg::dist(x, center) >= radius * (1.0 - BOUNDARY_TOL)
}

/// Minimize `f + sum rho_i [c_i]_+` of quadratic surrogates over the trust region.
pub fn quadratic_merit_step(
    objective: &QuadModel,
    constraints: &[QuadModel],
    merit: &MeritConfig,
    bounds: &Bounds,
    tr: &TrustRegionState,
    search: &SearchConfig,
    seed: u64,
) -> Step {
    let region = Region {
        bounds,
        center: &tr.center,
        radius: tr.radius,
    };
    let model_merit = |x: &[f64]| {
        let c: Vec<f64> = constraints.iter().map(|m| m.predict(x)).collect();
        merit.sum_merit(objective.predict(x), &c)
    };
    let extra = alloc::vec![quadratic_ball_step(objective, &tr.center, tr.radius)];
    let cfg = SearchConfig {
        random_directions: search.random_directions || !constraints.is_empty(),
        ..*search
    };
    let mut r = rng::from_seed(seed);
    let (x, v) = minimize(&model_merit, &region, &extra, &cfg, &mut r);
    let surrogate_infeasible =
        !constraints.is_empty() && constraints.iter().all(|m| m.predict(&x) > 0.0);
    Step {
        predicted_reduction: model_merit(&tr.center) - v,
        on_boundary: on_boundary(&x, &tr.center, tr.radius),
        surrogate_infeasible,
        x,
    }
}

fn constraint_models(data: &Dataset, opts: QuadFit) -> Result<Vec<QuadModel>, FitError> {
    (0..data.n_constraints())
        .map(|j| fit_quadratic(&data.with_targets(data.constraint_column(j)), opts))
        .collect()
}

fn check_size(data: &Dataset) -> Result<(), FitError> {
    let needed = data.dim() + 1;
    if data.len() < needed {
        return Err(FitError::TooFewSamples {
            needed,
            got: data.len(),
        });
    }
    Ok(())
}

/// LSQM: PSD quadratic on all data, minimized over the trust region.
pub fn lsqm_step(
    data: &Dataset,
    bounds: &Bounds,
    tr: &TrustRegionState,
    search: &SearchConfig,
    seed: u64,
) -> Result<Step, FitError> {
    check_size(data)?;
    let f = fit_quadratic(data, QuadFit::convex())?;
    Ok(quadratic_merit_step(
        &f,
        &[],
        &MeritConfig::new(0),
        bounds,
        tr,
        search,
        seed,
    ))
}

/// CUATRO: PSD quadratics for objective and constraints on all data.
pub fn cuatro_step(
    data: &Dataset,
    bounds: &Bounds,
    tr: &TrustRegionState,
    merit: &MeritConfig,
    search: &SearchConfig,
    seed: u64,
) -> Result<Step, FitError> {
    check_size(data)?;
    let f = fit_quadratic(data, QuadFit::convex())?;
    let c = constraint_models(data, QuadFit::convex())?;
    Ok(quadratic_merit_step(
        &f, &c, merit, bounds, tr, search, seed,
    ))
}

/// Indices of the `k` samples closest to `center` (ties by index).
pub fn nearest(data: &Dataset, center: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..data.len()).collect();
    idx.sort_by(|a, b| {
        linalg::dist(data.input(*a), center)
            .total_cmp(&linalg::dist(data.input(*b), center))
            .then(a.cmp(b))
    });
    idx.truncate(k);
    idx
}

/// COBYQA: unprojected quadratics on the samples nearest the center.
pub fn cobyqa_step(
    data: &Dataset,
    bounds: &Bounds,
    tr: &TrustRegionState,
    merit: &MeritConfig,
    search: &SearchConfig,
    seed: u64,
) -> Result<Step, FitError> {
    check_size(data)?;
    let local = data.subset(&nearest(data, &tr.center, n_coefficients(data.dim())));
    let f = fit_quadratic(&local, QuadFit::default())?;
    let c = constraint_models(&local, QuadFit::default())?;
    Ok(quadratic_merit_step(
        &f, &c, merit, bounds, tr, search, seed,
    ))
}

//! Inner minimization shared by every optimizer: a space-filling candidate
//! pool over `ball(center, radius) ∩ box`, followed by a coordinate pattern
//! search from the best candidate. Closed-form candidates (trust-region
//! steps of the surrogates) can be added to the pool.

use alloc::vec::Vec;

use nalgebra::DVector;
use rand::RngExt;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg;
use crate::problem::Bounds;
use crate::rng::Rng;
use crate::sampling::latin_hypercube_with;
use crate::surrogates::QuadModel;

/// Candidate-pool and refinement settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Pool size per input dimension.
    pub pool_per_dim: usize,
    /// Pattern-search iterations.
    pub refine_steps: usize,
    /// Also poll `2 n_x` random directions each iteration.
    pub random_directions: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            pool_per_dim: 100,
            refine_steps: 20,
            random_directions: false,
        }
    }
}

/// Feasible region of an inner problem.
#[derive(Debug, Clone, Copy)]
pub struct Region<'a> {
    /// Box.
    pub bounds: &'a Bounds,
    /// Ball center, inside the box.
    pub center: &'a [f64],
    /// Ball radius; `f64::INFINITY` for the whole box.
    pub radius: f64,
}

impl<'a> Region<'a> {
    /// Whole box; `center` is only used as a reference point.
    pub fn whole(bounds: &'a Bounds, center: &'a [f64]) -> Self {
        Self {
            bounds,
            center,
            radius: f64::INFINITY,
        }
    }

    /// Clip to the box, then pull back toward the center onto the ball.
    /// Both steps keep the point in the box since the center is inside it.
    pub fn project(&self, x: &mut [f64]) {
        self.bounds.clip(x);
        if self.radius.is_finite() {
            let d = linalg::dist(x, self.center);
            if d > self.radius {
                let t = self.radius / d;
                for (v, c) in x.iter_mut().zip(self.center) {
                    *v = c + t * (*v - c);
                }
                self.bounds.clip(x);
            }
        }
    }

    /// Membership with tolerance `tol` on the radius.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.bounds.contains(x)
            && (!self.radius.is_finite() || linalg::dist(x, self.center) <= self.radius + tol)
    }

    fn sampling_box(&self) -> Bounds {
        if !self.radius.is_finite() {
            return self.bounds.clone();
        }
        let lo: Vec<f64> = (0..self.center.len())
            .map(|i| (self.center[i] - self.radius).max(self.bounds.lower()[i]))
            .collect();
        let hi: Vec<f64> = (0..self.center.len())
            .map(|i| (self.center[i] + self.radius).min(self.bounds.upper()[i]))
            .collect();
        // a collapsed side (center on a face with tiny radius) is widened minimally
        let hi = hi
            .iter()
            .zip(&lo)
            .map(|(h, l)| {
                if h > l {
                    *h
                } else {
                    l + f64::EPSILON.max(l.abs() * 1e-15)
                }
            })
            .collect();
        Bounds::new(lo, hi).unwrap_or_else(|_| self.bounds.clone())
    }

    /// Typical length scale of the region.
    pub fn scale(&self) -> f64 {
        if self.radius.is_finite() {
            self.radius
        } else {
            self.bounds.max_width()
        }
    }
}

/// `n` points spread over the region: a Latin hypercube of the box around
/// the ball, projected onto the ball.
pub fn candidate_pool(region: &Region<'_>, n: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    if n == 0 {
        return Vec::new();
    }
    let b = region.sampling_box();
    let mut pts = latin_hypercube_with(&b, n, rng).unwrap_or_default();
    for p in pts.iter_mut() {
        region.project(p);
    }
    pts
}

fn value(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
    let v = f(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Coordinate (and optionally random-direction) pattern search. The poll
/// step starts at `step` and halves after every unsuccessful poll.
pub fn pattern_search(
    f: &dyn Fn(&[f64]) -> f64,
    region: &Region<'_>,
    start: Vec<f64>,
    start_value: f64,
    step: f64,
    cfg: &SearchConfig,
    rng: &mut Rng,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut x = start;
    let mut fx = start_value;
    let mut h = step;
    let mut dir = alloc::vec![0.0; n];
    for _ in 0..cfg.refine_steps {
        let mut best: Option<(Vec<f64>, f64)> = None;
        let poll = |d: &[f64], best: &mut Option<(Vec<f64>, f64)>| {
            let mut y: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + h * b).collect();
            region.project(&mut y);
            let fy = value(f, &y);
            if fy < best.as_ref().map_or(fx, |b| b.1) {
                *best = Some((y, fy));
            }
        };
        for i in 0..n {
            for s in [1.0, -1.0] {
                dir.iter_mut().for_each(|v| *v = 0.0);
                dir[i] = s;
                poll(&dir, &mut best);
            }
        }
        if cfg.random_directions {
            for _ in 0..2 * n {
                for v in dir.iter_mut() {
                    *v = StandardNormal.sample(rng);
                }
                let norm = linalg::norm(&dir);
                if norm > 0.0 {
                    dir.iter_mut().for_each(|v| *v /= norm);
                    poll(&dir, &mut best);
                }
            }
        }
        match best {
            Some((y, fy)) => {
                x = y;
                fx = fy;
            }
            None => h *= 0.5,
        }
    }
    (x, fx)
}

/// Minimize `f` over the region: pool of `pool_per_dim * n_x` points plus
/// the center and `extra` candidates, then pattern search from the best.
/// Ties keep the earliest candidate (center first, then `extra`, then pool).
pub fn minimize(
    f: &dyn Fn(&[f64]) -> f64,
    region: &Region<'_>,
    extra: &[Vec<f64>],
    cfg: &SearchConfig,
    rng: &mut Rng,
) -> (Vec<f64>, f64) {
    let n = region.center.len();
    let pool = candidate_pool(region, cfg.pool_per_dim * n, rng);
    let mut best = region.center.to_vec();
    region.project(&mut best);
    let mut best_v = value(f, &best);
    for c in extra.iter().chain(&pool) {
        let mut c = c.clone();
        region.project(&mut c);
        let v = value(f, &c);
        if v < best_v {
            best = c;
            best_v = v;
        }
    }
    pattern_search(f, region, best, best_v, 0.25 * region.scale(), cfg, rng)
}

/// Exact minimizer of a quadratic model over `ball(center, radius)`,
/// ignoring the box. Uses the eigendecomposition of the Hessian and a
/// bisection on the secular equation (with the hard case handled).
pub fn quadratic_ball_step(model: &QuadModel, center: &[f64], radius: f64) -> Vec<f64> {
    let n = center.len();
    let h = model.q() * 2.0;
    let g = DVector::from_column_slice(&model.gradient(center));
    let eig = h.clone().symmetric_eigen();
    let gt = eig.eigenvectors.transpose() * &g;
    let lam = &eig.eigenvalues;
    let lmin = lam.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = lam.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let step_for = |mu: f64| -> DVector<f64> {
        let coef = DVector::from_iterator(
            n,
            (0..n).map(|i| {
                let d = lam[i] + mu;
                if d.abs() > 1e-300 {
                    -gt[i] / d
                } else {
                    0.0
                }
            }),
        );
        &eig.eigenvectors * coef
    };
    let to_point =
        |s: DVector<f64>| -> Vec<f64> { center.iter().zip(s.iter()).map(|(c, v)| c + v).collect() };
    if !radius.is_finite() {
        // unconstrained minimizer when it exists
        if lmin > 1e-12 * scale {
            return to_point(step_for(0.0));
        }
        return center.to_vec();
    }
    if lmin > 1e-12 * scale {
        let s = step_for(0.0);
        if s.norm() <= radius {
            return to_point(s);
        }
    }
    let lo0 = (-lmin).max(0.0);
    let mut lo = lo0 + 1e-14 * scale;
    if step_for(lo).norm() < radius {
        // hard case: fill up along the lowest eigenvector
        let s = step_for(lo);
        let imin = (0..n)
            .min_by(|a, b| lam[*a].total_cmp(&lam[*b]))
            .unwrap_or(0);
        let v: DVector<f64> = eig.eigenvectors.column(imin).into_owned();
        let tau = libm::sqrt((radius * radius - s.norm_squared()).max(0.0));
        let s2 = s + v * tau;
        return to_point(s2);
    }
    let mut hi = lo0 + g.norm() / radius + scale;
    while step_for(hi).norm() > radius {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if step_for(mid).norm() > radius {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    let s = step_for(hi);
    let k = (radius / s.norm().max(1e-300)).min(1.0);
    let s = s * k;
    to_point(s)
}

/// Minimizer of `g's` over `||s|| <= radius`: `center - radius g/|g|`.
pub fn linear_ball_step(gradient: &[f64], center: &[f64], radius: f64) -> Vec<f64> {
    let gn = linalg::norm(gradient);
    if !(gn > 0.0) || !radius.is_finite() {
        return center.to_vec();
    }
    linalg::axpy(center, -radius / gn, gradient)
}

/// Candidates for `min g's` over the ball intersected with the half-space
/// `a's + b <= 0` (`s = x - center`): the closest point of the plane to the
/// center and the optimum on the plane-ball circle.
pub fn linear_halfspace_candidates(
    gradient: &[f64],
    a: &[f64],
    b: f64,
    center: &[f64],
    radius: f64,
) -> Vec<Vec<f64>> {
    let n = center.len();
    let an2 = linalg::dot(a, a);
    if !(an2 > 0.0) || !radius.is_finite() {
        return Vec::new();
    }
    let s0: Vec<f64> = a.iter().map(|v| -b / an2 * v).collect();
    let r0 = linalg::norm(&s0);
    let mut out = alloc::vec![center
        .iter()
        .zip(&s0)
        .map(|(c, s)| c + s)
        .collect::<Vec<f64>>()];
    if r0 < radius {
        // direction of steepest descent inside the plane
        let ga = linalg::dot(gradient, a) / an2;
        let d: Vec<f64> = (0..n).map(|i| -(gradient[i] - ga * a[i])).collect();
        let dn = linalg::norm(&d);
        if dn > 0.0 {
            let t = libm::sqrt(radius * radius - r0 * r0) / dn;
            out.push((0..n).map(|i| center[i] + s0[i] + t * d[i]).collect());
        }
    }
    out
}

/// Uniform random point of the box.
pub fn random_point(bounds: &Bounds, rng: &mut Rng) -> Vec<f64> {
    (0..bounds.dim())
        .map(|i| bounds.lower()[i] + rng.random::<f64>() * bounds.width(i))
        .collect()
}

//! Steady-state solver for `r(x) = 0` where `r` is the time derivative of a
//! dynamic model: damped Newton with a finite-difference Jacobian, falling
//! back to pseudo-transient continuation.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::SimError;

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateOptions {
    /// Convergence threshold on the residual infinity norm.
    pub tol: f64,
    /// Newton iterations.
    pub max_newton: usize,
    /// Pseudo-transient iterations.
    pub max_transient: usize,
    /// Relative finite-difference step.
    pub fd_step: f64,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_newton: 50,
            max_transient: 2000,
            fd_step: 1e-7,
        }
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| {
        if x.is_nan() {
            f64::INFINITY
        } else {
            m.max(x.abs())
        }
    })
}

fn jacobian(r: &impl Fn(&[f64]) -> Vec<f64>, x: &[f64], r0: &[f64], rel: f64) -> DMatrix<f64> {
    let n = x.len();
    let mut j = DMatrix::zeros(r0.len(), n);
    let mut xp = x.to_vec();
    for c in 0..n {
        let h = rel * x[c].abs().max(1.0);
        xp[c] = x[c] + h;
        let rp = r(&xp);
        xp[c] = x[c];
        for i in 0..r0.len() {
            j[(i, c)] = (rp[i] - r0[i]) / h;
        }
    }
    j
}

/// Damped Newton from `x0`; `admissible` rejects steps into nonphysical
/// states. Returns `None` when it stalls.
fn newton(
    r: &impl Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    admissible: &impl Fn(&[f64]) -> bool,
    opts: &SteadyStateOptions,
) -> Option<Vec<f64>> {
    let mut x = x0.to_vec();
    let mut rx = r(&x);
    let mut norm = inf_norm(&rx);
    for _ in 0..opts.max_newton {
        if norm < opts.tol {
            return Some(x);
        }
        let j = jacobian(r, &x, &rx, opts.fd_step);
        let step = j.lu().solve(&(-DVector::from_column_slice(&rx)))?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let xt: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + t * s).collect();
            if admissible(&xt) {
                let rt = r(&xt);
                let nt = inf_norm(&rt);
                if nt < norm || nt < opts.tol {
                    x = xt;
                    rx = rt;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    (norm < opts.tol).then_some(x)
}

/// Pseudo-transient continuation: implicit Euler steps on `x' = r(x)` with
/// a pseudo time step grown by switched evolution relaxation.
fn transient(
    r: &impl Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    admissible: &impl Fn(&[f64]) -> bool,
    opts: &SteadyStateOptions,
) -> Result<Vec<f64>, SimError> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut rx = r(&x);
    let mut norm = inf_norm(&rx);
    let mut tau = 1e-3;
    for _ in 0..opts.max_transient {
        if norm < opts.tol {
            return Ok(x);
        }
        let j = jacobian(r, &x, &rx, opts.fd_step);
        let a = DMatrix::identity(n, n) / tau - j;
        let Some(dx) = a.lu().solve(&DVector::from_column_slice(&rx)) else {
            tau *= 0.1;
            continue;
        };
        let xt: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, s)| a + s).collect();
        let rt = r(&xt);
        let nt = inf_norm(&rt);
        if !admissible(&xt) || !nt.is_finite() {
            tau *= 0.25;
            if tau < 1e-12 {
                break;
            }
            continue;
        }
        tau = (tau * (norm / nt.max(1e-300))).clamp(1e-8, 1e12);
        x = xt;
        rx = rt;
        norm = nt;
    }
    if norm < opts.tol {
        Ok(x)
    } else {
        Err(SimError::NotConverged { residual: norm })
    }
}

/// Solve `r(x) = 0` from `x0`, keeping iterates inside `admissible`.
///
/// Newton runs first; if it stalls or leaves the admissible set, the solve
/// restarts from `x0` with pseudo-transient continuation, whose result is
/// polished by a final Newton pass.
pub fn steady_state(
    r: impl Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    admissible: impl Fn(&[f64]) -> bool,
    opts: &SteadyStateOptions,
) -> Result<Vec<f64>, SimError> {
    if let Some(x) = newton(&r, x0, &admissible, opts) {
        return Ok(x);
    }
    let x = transient(&r, x0, &admissible, opts)?;
    Ok(newton(&r, &x, &admissible, opts).unwrap_or(x))
}

/// Residual infinity norm, NaN mapped to infinity.
pub fn residual_norm(r: &[f64]) -> f64 {
    inf_norm(r)
}

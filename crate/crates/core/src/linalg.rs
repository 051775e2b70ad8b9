//! Small dense linear-algebra helpers on top of `nalgebra`.

use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::FitError;

/// Jitter ladder tried in order when a Cholesky factorization fails.
pub const JITTER_LADDER: [f64; 7] = [1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4];

/// Cholesky factor of `k + jitter * I` for the smallest jitter of
/// [`JITTER_LADDER`] that succeeds. Returns the factor and the jitter used.
pub fn cholesky_with_jitter(k: &DMatrix<f64>) -> Result<(Cholesky<f64, Dyn>, f64), FitError> {
    let scale = k
        .diagonal()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);
    for jitter in JITTER_LADDER {
        let mut m = k.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += jitter * scale;
        }
        if let Some(c) = m.cholesky() {
            if c.l_dirty()
                .diagonal()
                .iter()
                .all(|d| d.is_finite() && *d > 0.0)
            {
                return Ok((c, jitter * scale));
            }
        }
    }
    Err(FitError::NotPositiveDefinite {
        max_jitter: JITTER_LADDER[JITTER_LADDER.len() - 1],
    })
}

/// Ridge-regularized least squares `argmin ||A p - y||^2 + ridge ||p||^2`.
///
/// Computed through the SVD of `A`, which also gives the minimum-norm
/// solution of underdetermined systems. With `ridge == 0` singular values
/// below `1e-12 * s_max` are treated as zero.
pub fn ridge_solve(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    ridge: f64,
) -> Result<DVector<f64>, FitError> {
    if a.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(FitError::NonFinite);
    }
    let svd = a.clone().svd(true, true);
    let (u, vt) = match (svd.u.as_ref(), svd.v_t.as_ref()) {
        (Some(u), Some(vt)) => (u, vt),
        _ => {
            return Err(FitError::Singular {
                condition: f64::INFINITY,
            })
        }
    };
    let s_max = svd.singular_values.iter().fold(0.0f64, |m, v| m.max(*v));
    let uty = u.transpose() * y;
    let mut coef = DVector::zeros(svd.singular_values.len());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        let w = if ridge > 0.0 {
            s / (s * s + ridge)
        } else if s > 1e-12 * s_max {
            1.0 / s
        } else {
            0.0
        };
        coef[i] = w * uty[i];
    }
    Ok(vt.transpose() * coef)
}

/// Ratio of the largest to the smallest singular value (`inf` if singular).
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let s = a.singular_values();
    let max = s.iter().fold(0.0f64, |m, v| m.max(*v));
    let min = s.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    if min <= 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solve a square system by LU with full pivoting.
pub fn solve_square(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>, FitError> {
    let lu = a.clone().full_piv_lu();
    match lu.solve(b) {
        Some(x) if x.iter().all(|v| v.is_finite()) => Ok(x),
        _ => Err(FitError::Singular {
            condition: condition_number(a),
        }),
    }
}

/// Frobenius-nearest positive semidefinite matrix to the symmetric part of
/// `q`: eigenvalues below zero are clipped to zero.
pub fn psd_project(q: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (q + q.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let clipped = eig.eigenvalues.map(|v| v.max(0.0));
    let v = &eig.eigenvectors;
    let out = v * DMatrix::from_diagonal(&clipped) * v.transpose();
    (&out + out.transpose()) * 0.5
}

/// Smallest eigenvalue of the symmetric part of `q`.
pub fn min_eigenvalue(q: &DMatrix<f64>) -> f64 {
    let sym = (q + q.transpose()) * 0.5;
    sym.symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |m, v| m.min(*v))
}

/// Euclidean dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Euclidean distance.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// `a + t * b`.
pub fn axpy(a: &[f64], t: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * y).collect()
}

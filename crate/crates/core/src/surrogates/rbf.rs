//! Cubic radial basis function interpolation with a linear tail.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::DUPLICATE_TOL;
use crate::dataset::Dataset;
use crate::error::FitError;
use crate::linalg;

/// Radial kernel of an [`RbfModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RbfKernel {
    /// `phi(r) = r^3`.
    Cubic,
}

impl RbfKernel {
    fn eval(self, r: f64) -> f64 {
        match self {
            RbfKernel::Cubic => r * r * r,
        }
    }
}

/// Interpolant `s(x) = sum_i lambda_i phi(|x - x_i|) + c_0 + c' x`.
#[derive(Debug, Clone)]
pub struct RbfModel {
    centers: DMatrix<f64>,
    lambda: DVector<f64>,
    poly: DVector<f64>,
    kernel: RbfKernel,
}

/// Fit a cubic RBF interpolant with linear tail by solving the saddle system
/// `[[Phi, P], [P', 0]] [lambda; c] = [F; 0]`.
///
/// Coincident inputs are merged first. Requires `rank(P) = n_x + 1`.
pub fn fit_rbf(data: &Dataset) -> Result<RbfModel, FitError> {
    data.check_finite()?;
    let data = data.merge_duplicates(DUPLICATE_TOL);
    let n = data.len();
    let dim = data.dim();
    if n < dim + 1 {
        return Err(FitError::TooFewSamples {
            needed: dim + 1,
            got: n,
        });
    }
    let rows = data.inputs();
    let p = DMatrix::from_fn(n, dim + 1, |i, j| if j == 0 { 1.0 } else { rows[i][j - 1] });
    let sv = p.singular_values();
    let smax = sv.iter().fold(0.0f64, |m, v| m.max(*v));
    let smin = sv.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    if !(smin > 1e-10 * smax) {
        return Err(FitError::Singular {
            condition: if smin > 0.0 {
                smax / smin
            } else {
                f64::INFINITY
            },
        });
    }
    let m = n + dim + 1;
    let mut a = DMatrix::zeros(m, m);
    for i in 0..n {
        for j in 0..i {
            let v = RbfKernel::Cubic.eval(linalg::dist(&rows[i], &rows[j]));
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
        for k in 0..=dim {
            a[(i, n + k)] = p[(i, k)];
            a[(n + k, i)] = p[(i, k)];
        }
    }
    let mut rhs = DVector::zeros(m);
    rhs.rows_mut(0, n).copy_from_slice(data.targets());
    let sol = linalg::solve_square(&a, &rhs)?;
    Ok(RbfModel {
        centers: data.input_matrix(),
        lambda: sol.rows(0, n).into_owned(),
        poly: sol.rows(n, dim + 1).into_owned(),
        kernel: RbfKernel::Cubic,
    })
}

impl RbfModel {
    /// Interpolant value at `x`.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut s = self.poly[0];
        for (j, v) in x.iter().enumerate() {
            s += self.poly[j + 1] * v;
        }
        for (i, row) in self.centers.row_iter().enumerate() {
            let r2: f64 = row.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            s += self.lambda[i] * self.kernel.eval(libm::sqrt(r2));
        }
        s
    }

    /// RBF weights `lambda`.
    pub fn lambda(&self) -> &DVector<f64> {
        &self.lambda
    }

    /// Linear tail `(c_0, c_1..c_n)`.
    pub fn poly_coeffs(&self) -> &DVector<f64> {
        &self.poly
    }

    /// Interpolation nodes, one per row.
    pub fn centers(&self) -> &DMatrix<f64> {
        &self.centers
    }

    /// Kernel.
    pub fn kernel(&self) -> RbfKernel {
        self.kernel
    }

    /// `max_k |(P' lambda)_k|`, zero for an exact saddle solve.
    pub fn side_condition_residual(&self) -> f64 {
        let n = self.centers.nrows();
        let dim = self.centers.ncols();
        let mut worst = self.lambda.sum().abs();
        for j in 0..dim {
            let s: f64 = (0..n).map(|i| self.lambda[i] * self.centers[(i, j)]).sum();
            worst = worst.max(s.abs());
        }
        worst
    }

    /// Predictions at many points.
    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        xs.iter().map(|x| self.predict(x)).collect()
    }
}

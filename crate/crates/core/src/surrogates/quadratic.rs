//! Quadratic least-squares surrogates `x'Qx + c'x + b`.
//!
//! Regression happens in centered and scaled coordinates (each input shifted
//! by its sample mean and divided by its largest absolute deviation); the
//! ridge penalty acts on the monomial coefficients in those coordinates. The
//! result is mapped back to data coordinates.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::linear::{affine_fit, Frame};
use crate::dataset::Dataset;
use crate::error::FitError;
use crate::linalg;

/// Default ridge weight.
pub const DEFAULT_RIDGE: f64 = 1e-8;

/// Options of [`fit_quadratic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadFit {
    /// Ridge weight on the monomial coefficients.
    pub ridge: f64,
    /// Replace `Q` by its nearest PSD matrix and refit `c`, `b`.
    pub psd_project: bool,
}

impl Default for QuadFit {
    fn default() -> Self {
        Self {
            ridge: DEFAULT_RIDGE,
            psd_project: false,
        }
    }
}

impl QuadFit {
    /// Default ridge with PSD projection.
    pub fn convex() -> Self {
        Self {
            psd_project: true,
            ..Self::default()
        }
    }
}

/// Quadratic surrogate `x'Qx + c'x + b` with symmetric `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadModel {
    q: DMatrix<f64>,
    c: DVector<f64>,
    b: f64,
}

impl QuadModel {
    /// Model from its coefficients; `Q` is symmetrized.
    pub fn new(q: DMatrix<f64>, c: DVector<f64>, b: f64) -> Self {
        assert!(q.is_square() && q.nrows() == c.len(), "shape mismatch");
        let q = (&q + q.transpose()) * 0.5;
        Self { q, c, b }
    }

    /// Quadratic term.
    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// Linear term.
    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    /// Constant term.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Input dimension.
    pub fn dim(&self) -> usize {
        self.c.len()
    }

    /// Surrogate value.
    pub fn predict(&self, x: &[f64]) -> f64 {
        let v = DVector::from_column_slice(x);
        v.dot(&(&self.q * &v)) + self.c.dot(&v) + self.b
    }

    /// Gradient `2Qx + c`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(x);
        let g = &self.q * &v * 2.0 + &self.c;
        g.iter().copied().collect()
    }

    /// Smallest eigenvalue of `Q`.
    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.q)
    }
}

/// Number of coefficients of a full quadratic in `dim` variables.
pub fn n_coefficients(dim: usize) -> usize {
    (dim + 1) * (dim + 2) / 2
}

fn monomials(z: &[f64], out: &mut Vec<f64>) {
    out.clear();
    let n = z.len();
    for i in 0..n {
        for j in i..n {
            out.push(z[i] * z[j]);
        }
    }
    out.extend_from_slice(z);
    out.push(1.0);
}

/// Ridge least-squares quadratic fit.
///
/// With fewer samples than coefficients the minimum-norm ridge solution is
/// returned. With `psd_project`, `Q` is replaced by its Frobenius-nearest PSD
/// matrix and `c`, `b` are refitted to the remaining residual.
pub fn fit_quadratic(data: &Dataset, opts: QuadFit) -> Result<QuadModel, FitError> {
    if data.is_empty() {
        return Err(FitError::TooFewSamples { needed: 1, got: 0 });
    }
    data.check_finite()?;
    let rows = data.inputs();
    let dim = data.dim();
    let frame = Frame::of(rows);
    let p = n_coefficients(dim);
    let mut a = DMatrix::zeros(rows.len(), p);
    let mut buf = Vec::with_capacity(p);
    for (i, r) in rows.iter().enumerate() {
        monomials(&frame.apply(r), &mut buf);
        for (j, v) in buf.iter().enumerate() {
            a[(i, j)] = *v;
        }
    }
    let theta = linalg::ridge_solve(&a, &DVector::from_column_slice(data.targets()), opts.ridge)?;

    // unpack in scaled coordinates
    let mut qz = DMatrix::zeros(dim, dim);
    let mut k = 0;
    for i in 0..dim {
        for j in i..dim {
            if i == j {
                qz[(i, i)] = theta[k];
            } else {
                qz[(i, j)] = 0.5 * theta[k];
                qz[(j, i)] = 0.5 * theta[k];
            }
            k += 1;
        }
    }
    let cz = DVector::from_iterator(dim, (0..dim).map(|j| theta[k + j]));
    let bz = theta[k + dim];

    // back to data coordinates
    let dinv = DVector::from_iterator(dim, frame.scale.iter().map(|s| 1.0 / s));
    let shift = DVector::from_column_slice(&frame.shift);
    let q = DMatrix::from_fn(dim, dim, |i, j| dinv[i] * qz[(i, j)] * dinv[j]);
    let dc = cz.component_mul(&dinv);
    let qs = &q * &shift;
    let c = &dc - &qs * 2.0;
    let b = bz + shift.dot(&qs) - dc.dot(&shift);

    if !opts.psd_project {
        return Ok(QuadModel::new(q, c, b));
    }
    let q = linalg::psd_project(&q);
    let resid: Vec<f64> = rows
        .iter()
        .zip(data.targets())
        .map(|(r, y)| {
            let v = DVector::from_column_slice(r);
            y - v.dot(&(&q * &v))
        })
        .collect();
    let (c, b) = affine_fit(rows, &resid, opts.ridge)?;
    Ok(QuadModel::new(q, DVector::from_vec(c), b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::latin_hypercube;
    use crate::Bounds;
    use alloc::vec;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn exact(opts: QuadFit) -> QuadFit {
        QuadFit { ridge: 0.0, ..opts }
    }

    #[test]
    fn parabola_1d() {
        let d = Dataset::from_rows(vec![vec![-1.0], vec![0.0], vec![1.0]], vec![1.0, 0.0, 1.0]);
        let m = fit_quadratic(&d, exact(QuadFit::default())).unwrap();
        assert_relative_eq!(m.q()[(0, 0)], 1.0, epsilon = 1e-8);
        assert_relative_eq!(m.c()[0], 0.0, epsilon = 1e-8);
        assert_relative_eq!(m.b(), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn recovers_constrained_quadratic_objective() {
        let f = |x: &[f64]| x[0] * x[0] + 0.95 * x[0] * x[1] + 5.9 * x[1] * x[1];
        let b = Bounds::uniform(2, -5.0, 5.0).unwrap();
        let xs = latin_hypercube(&b, 8, 5).unwrap();
        let ys = xs.iter().map(|x| f(x)).collect();
        let m = fit_quadratic(&Dataset::from_rows(xs, ys), QuadFit::default()).unwrap();
        let want = [[1.0, 0.475], [0.475, 5.9]];
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(m.q()[(i, j)], want[i][j], epsilon = 1e-6);
            }
            assert!(m.c()[i].abs() < 1e-6);
        }
        assert!(m.b().abs() < 1e-6);
    }

    #[test]
    fn psd_projection_clips_indefinite_fit() {
        // exact data from x1^2 - 2 x2^2
        let f = |x: &[f64]| x[0] * x[0] - 2.0 * x[1] * x[1];
        let b = Bounds::uniform(2, -1.0, 1.0).unwrap();
        let xs = latin_hypercube(&b, 12, 1).unwrap();
        let ys = xs.iter().map(|x| f(x)).collect();
        let d = Dataset::from_rows(xs, ys);
        let raw = fit_quadratic(&d, exact(QuadFit::default())).unwrap();
        assert_relative_eq!(raw.q()[(1, 1)], -2.0, epsilon = 1e-8);
        let m = fit_quadratic(&d, exact(QuadFit::convex())).unwrap();
        assert!(m.min_eigenvalue() >= -1e-10);
        assert_relative_eq!(m.q()[(0, 0)], 1.0, epsilon = 1e-8);
        assert!(m.q()[(1, 1)].abs() < 1e-8 && m.q()[(0, 1)].abs() < 1e-8);
    }

    #[test]
    fn underdetermined_fit_interpolates() {
        // three points, six coefficients: minimum-norm solution still interpolates
        let d = Dataset::from_rows(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]],
            vec![1.0, 3.0, -2.0],
        );
        let m = fit_quadratic(&d, exact(QuadFit::default())).unwrap();
        for (x, y) in d.inputs().iter().zip(d.targets()) {
            assert_relative_eq!(m.predict(x), *y, epsilon = 1e-9);
        }
    }

    #[test]
    fn constant_data_gives_flat_model() {
        let b = Bounds::uniform(2, -2.0, 2.0).unwrap();
        let xs = latin_hypercube(&b, 10, 3).unwrap();
        let m = fit_quadratic(&Dataset::from_rows(xs, vec![2.75; 10]), QuadFit::default()).unwrap();
        assert!(m.q().amax() < 1e-6 && m.c().amax() < 1e-6);
        assert_relative_eq!(m.b(), 2.75, epsilon = 1e-6);
    }

    proptest! {
        // unregularized least squares is a projection
        #[test]
        fn refit_on_own_predictions_is_idempotent(
            coeffs in proptest::collection::vec(-3.0f64..3.0, 6),
            seed in any::<u64>(),
        ) {
            let q = DMatrix::from_row_slice(2, 2, &[coeffs[0], coeffs[1], coeffs[1], coeffs[2]]);
            let truth = QuadModel::new(q, DVector::from_vec(vec![coeffs[3], coeffs[4]]), coeffs[5]);
            let b = Bounds::uniform(2, -2.0, 2.0).unwrap();
            let xs = latin_hypercube(&b, 10, seed).unwrap();
            let ys = xs.iter().map(|x| truth.predict(x)).collect();
            let first = fit_quadratic(&Dataset::from_rows(xs.clone(), ys), exact(QuadFit::default())).unwrap();
            let ys2: Vec<f64> = xs.iter().map(|x| first.predict(x)).collect();
            let second = fit_quadratic(&Dataset::from_rows(xs, ys2), exact(QuadFit::default())).unwrap();
            prop_assert!((first.q() - second.q()).amax() < 1e-8);
            prop_assert!((first.c() - second.c()).amax() < 1e-8);
            prop_assert!((first.b() - second.b()).abs() < 1e-8);
        }
    }
}

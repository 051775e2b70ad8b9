//! Affine least-squares surrogates.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::dataset::Dataset;
use crate::error::FitError;
use crate::linalg;

/// Affine surrogate `g'x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinModel {
    /// Gradient of the surrogate.
    pub gradient: Vec<f64>,
    /// Offset.
    pub b: f64,
}

impl LinModel {
    /// Surrogate value at `x`.
    pub fn predict(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.gradient, x) + self.b
    }
}

/// Centering and scaling of inputs used by the polynomial fits.
#[derive(Debug, Clone)]
pub(crate) struct Frame {
    pub shift: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Frame {
    pub fn of(rows: &[Vec<f64>]) -> Self {
        let n = rows.len() as f64;
        let dim = rows.first().map_or(0, Vec::len);
        let mut shift = alloc::vec![0.0; dim];
        for r in rows {
            for (s, v) in shift.iter_mut().zip(r) {
                *s += v / n;
            }
        }
        let mut scale = alloc::vec![0.0f64; dim];
        for r in rows {
            for j in 0..dim {
                scale[j] = scale[j].max((r[j] - shift[j]).abs());
            }
        }
        for s in scale.iter_mut() {
            if !(*s > 0.0) {
                *s = 1.0;
            }
        }
        Self { shift, scale }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(j, v)| (v - self.shift[j]) / self.scale[j])
            .collect()
    }
}

/// Ridge fit of `c'x + b` to `y`; returns `(c, b)` in data coordinates.
pub(crate) fn affine_fit(
    rows: &[Vec<f64>],
    y: &[f64],
    ridge: f64,
) -> Result<(Vec<f64>, f64), FitError> {
    let frame = Frame::of(rows);
    let dim = frame.shift.len();
    let a = DMatrix::from_fn(rows.len(), dim + 1, |i, j| {
        if j < dim {
            (rows[i][j] - frame.shift[j]) / frame.scale[j]
        } else {
            1.0
        }
    });
    let theta = linalg::ridge_solve(&a, &DVector::from_column_slice(y), ridge)?;
    let c: Vec<f64> = (0..dim).map(|j| theta[j] / frame.scale[j]).collect();
    let b = theta[dim] - linalg::dot(&c, &frame.shift);
    Ok((c, b))
}

/// Least-squares affine fit with ridge regularization. Interpolates when
/// the data are `n_x + 1` affinely independent points.
pub fn fit_linear(data: &Dataset, ridge: f64) -> Result<LinModel, FitError> {
    if data.is_empty() {
        return Err(FitError::TooFewSamples { needed: 1, got: 0 });
    }
    data.check_finite()?;
    let (gradient, b) = affine_fit(data.inputs(), data.targets(), ridge)?;
    Ok(LinModel { gradient, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    #[test]
    fn recovers_affine_1d() {
        let d = Dataset::from_rows(vec![vec![0.0], vec![1.0]], vec![1.0, 4.0]);
        let m = fit_linear(&d, 0.0).unwrap();
        assert_relative_eq!(m.gradient[0], 3.0, epsilon = 1e-10);
        assert_relative_eq!(m.b, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn constant_data() {
        let d = Dataset::from_rows(
            vec![vec![0.0, 1.0], vec![2.0, -1.0], vec![1.0, 3.0]],
            vec![7.0; 3],
        );
        let m = fit_linear(&d, 0.0).unwrap();
        assert!(m.gradient.iter().all(|g| g.abs() < 1e-10));
        assert_relative_eq!(m.b, 7.0, epsilon = 1e-10);
    }

    /// 1 + x1 + 3 x2 through (0,0)->1, (1,0)->2, (0,1)->4.
    #[test]
    fn simplex_interpolation() {
        let d = Dataset::from_rows(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![1.0, 2.0, 4.0],
        );
        let m = fit_linear(&d, 0.0).unwrap();
        assert_relative_eq!(m.gradient[0], 1.0, epsilon = 1e-10);
        assert_relative_eq!(m.gradient[1], 3.0, epsilon = 1e-10);
        assert_relative_eq!(m.b, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn least_squares_when_overdetermined() {
        // y = 2x with symmetric noise of +-0.1 averages out
        let d = Dataset::from_rows(
            vec![vec![0.0], vec![0.0], vec![1.0], vec![1.0]],
            vec![0.1, -0.1, 2.1, 1.9],
        );
        let m = fit_linear(&d, 0.0).unwrap();
        assert_relative_eq!(m.gradient[0], 2.0, epsilon = 1e-10);
        assert_relative_eq!(m.b, 0.0, epsilon = 1e-10);
    }
}

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::FitError;

/// Sampled inputs (one row per sample), objective outputs and optional
/// constraint outputs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    g: Option<Vec<Vec<f64>>>,
}

impl Dataset {
    /// Empty dataset.
    pub fn new() -> Self {
        Self::default()
    }

    /// Dataset from rows and targets; rows must share a dimension.
    pub fn from_rows(x: Vec<Vec<f64>>, y: Vec<f64>) -> Self {
        assert_eq!(x.len(), y.len(), "row count must equal target count");
        if let Some(first) = x.first() {
            assert!(x.iter().all(|r| r.len() == first.len()), "ragged rows");
        }
        Self { x, y, g: None }
    }

    /// Attach constraint outputs, one row per sample.
    pub fn with_constraints(mut self, g: Vec<Vec<f64>>) -> Self {
        assert_eq!(g.len(), self.x.len(), "constraint rows must match samples");
        self.g = Some(g);
        self
    }

    /// Append one sample.
    pub fn push(&mut self, x: Vec<f64>, y: f64, g: &[f64]) {
        if let Some(first) = self.x.first() {
            assert_eq!(first.len(), x.len(), "dimension mismatch");
        }
        if !g.is_empty() || self.g.is_some() {
            let rows = self.g.get_or_insert_with(Vec::new);
            rows.push(g.to_vec());
        }
        self.x.push(x);
        self.y.push(y);
    }

    /// Number of samples `n_d`.
    pub fn len(&self) -> usize {
        self.y.len()
    }

    /// Whether there are no samples.
    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Input dimension, 0 when empty.
    pub fn dim(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    /// Number of constraint columns.
    pub fn n_constraints(&self) -> usize {
        self.g.as_ref().and_then(|g| g.first()).map_or(0, Vec::len)
    }

    /// Input rows.
    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.x
    }

    /// Input row `i`.
    pub fn input(&self, i: usize) -> &[f64] {
        &self.x[i]
    }

    /// Objective outputs.
    pub fn targets(&self) -> &[f64] {
        &self.y
    }

    /// Constraint rows, if present.
    pub fn constraints(&self) -> Option<&[Vec<f64>]> {
        self.g.as_deref()
    }

    /// Constraint row of sample `i` (empty when unconstrained).
    pub fn constraint_row(&self, i: usize) -> &[f64] {
        self.g.as_ref().map_or(&[], |g| g[i].as_slice())
    }

    /// Column `j` of the constraint outputs.
    pub fn constraint_column(&self, j: usize) -> Vec<f64> {
        self.g
            .as_ref()
            .map(|g| g.iter().map(|r| r[j]).collect())
            .unwrap_or_default()
    }

    /// Same inputs with different targets (used to fit constraint surrogates).
    pub fn with_targets(&self, y: Vec<f64>) -> Dataset {
        Dataset::from_rows(self.x.clone(), y)
    }

    /// Samples selected by index.
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            x: idx.iter().map(|&i| self.x[i].clone()).collect(),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            g: self
                .g
                .as_ref()
                .map(|g| idx.iter().map(|&i| g[i].clone()).collect()),
        }
    }

    /// Index of the smallest objective value.
    pub fn argmin(&self) -> Option<usize> {
        (0..self.len()).min_by(|&a, &b| self.y[a].total_cmp(&self.y[b]))
    }

    /// Inputs as an `n_d x n_x` matrix.
    pub fn input_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.len(), self.dim(), |i, j| self.x[i][j])
    }

    /// Fails when any input or target is not finite.
    pub fn check_finite(&self) -> Result<(), FitError> {
        let ok =
            self.y.iter().all(|v| v.is_finite()) && self.x.iter().flatten().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(FitError::NonFinite)
        }
    }

    /// Merge samples whose inputs coincide within `tol` (max-norm); targets
    /// of merged samples are averaged. Constraint outputs are dropped.
    pub fn merge_duplicates(&self, tol: f64) -> Dataset {
        let mut x: Vec<Vec<f64>> = Vec::with_capacity(self.len());
        let mut sum: Vec<f64> = Vec::new();
        let mut count: Vec<usize> = Vec::new();
        for (row, &y) in self.x.iter().zip(&self.y) {
            let hit = x
                .iter()
                .position(|r| r.iter().zip(row).all(|(a, b)| (a - b).abs() <= tol));
            match hit {
                Some(k) => {
                    sum[k] += y;
                    count[k] += 1;
                }
                None => {
                    x.push(row.clone());
                    sum.push(y);
                    count.push(1);
                }
            }
        }
        let y = sum.iter().zip(&count).map(|(s, c)| s / *c as f64).collect();
        Dataset::from_rows(x, y)
    }
}

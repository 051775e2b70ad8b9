//! Surrogate models fitted to a [`Dataset`](crate::Dataset).
//!
//! * [`gp`]: zero-mean Gaussian process on standardized targets, squared
//!   exponential kernel with one lengthscale per input.
//! * [`quadratic`]: `x'Qx + c'x + b` by ridge least squares, optionally with
//!   `Q` projected onto the PSD cone.
//! * [`linear`]: affine least squares / simplex interpolation.
//! * [`rbf`]: cubic radial basis interpolant with a linear tail.

pub mod gp;
pub mod linear;
pub mod quadratic;
pub mod rbf;

pub use gp::{fit_gp, fit_gp_with, GpHyper, GpModel, NoiseMode};
pub use linear::{fit_linear, LinModel};
pub use quadratic::{fit_quadratic, QuadFit, QuadModel};
pub use rbf::{fit_rbf, RbfModel};

/// Tolerance below which two inputs are treated as the same point.
pub const DUPLICATE_TOL: f64 = 1e-10;

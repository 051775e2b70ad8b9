//! Gaussian process regression.
//!
//! Targets are standardized at every fit; the prior mean is zero in
//! standardized units, i.e. the sample mean of `y` in data units. All
//! variances stored on [`GpModel`] (signal, noise) are in standardized units.
//!
//! Hyperparameters maximize the log marginal likelihood over log-parameters:
//! a multi-start random search followed by coordinate-wise golden-section
//! refinement. No gradients are used.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::RngExt;

use super::DUPLICATE_TOL;
use crate::dataset::Dataset;
use crate::error::FitError;
use crate::linalg;
use crate::rng;

/// Number of random starts of the hyperparameter search.
pub const HYPER_STARTS: usize = 8;
/// Coordinate-wise refinement sweeps after the random search.
pub const REFINE_SWEEPS: usize = 2;
/// Golden-section iterations per coordinate.
const GOLDEN_ITERS: usize = 20;
/// Half-width, in natural-log units, of each golden-section window.
const GOLDEN_WINDOW: f64 = 2.5;

/// Bounds on the standardized noise variance when it is estimated.
pub const NOISE_VARIANCE_RANGE: (f64, f64) = (1e-8, 1.0);
/// Bounds on the standardized signal variance.
pub const SIGNAL_VARIANCE_RANGE: (f64, f64) = (1e-4, 1e4);
/// Lengthscale bounds as multiples of the per-dimension data range.
pub const LENGTHSCALE_RANGE: (f64, f64) = (1e-2, 1e2);

/// How the observation-noise variance is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseMode {
    /// Fixed standardized noise variance.
    Fixed(f64),
    /// Fitted with the other hyperparameters.
    Estimated,
}

/// Kernel and noise hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GpHyper {
    /// One lengthscale per input dimension.
    pub lengthscales: Vec<f64>,
    /// Kernel amplitude (standardized units).
    pub signal_variance: f64,
    /// Observation-noise variance (standardized units).
    pub noise_variance: f64,
}

/// A fitted Gaussian process.
#[derive(Debug, Clone)]
pub struct GpModel {
    x_train: DMatrix<f64>,
    y_train: DVector<f64>,
    hyper: GpHyper,
    jitter: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    y_mean: f64,
    y_std: f64,
}

fn sq_exp(a: &[f64], b: &[f64], ls: &[f64], s2: f64) -> f64 {
    let mut r2 = 0.0;
    for i in 0..a.len() {
        let d = (a[i] - b[i]) / ls[i];
        r2 += d * d;
    }
    s2 * libm::exp(-0.5 * r2)
}

fn standardize(y: &[f64]) -> (Vec<f64>, f64, f64) {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let mut std = libm::sqrt(var);
    if !(std > 1e-12 * mean.abs().max(1.0)) {
        std = 1.0;
    }
    (y.iter().map(|v| (v - mean) / std).collect(), mean, std)
}

struct Prepared {
    rows: Vec<Vec<f64>>,
    x: DMatrix<f64>,
    y: DVector<f64>,
    mean: f64,
    std: f64,
}

fn prepare(data: &Dataset) -> Result<Prepared, FitError> {
    if data.is_empty() {
        return Err(FitError::TooFewSamples { needed: 1, got: 0 });
    }
    data.check_finite()?;
    let merged = data.merge_duplicates(DUPLICATE_TOL);
    let (ys, mean, std) = standardize(merged.targets());
    Ok(Prepared {
        rows: merged.inputs().to_vec(),
        x: merged.input_matrix(),
        y: DVector::from_vec(ys),
        mean,
        std,
    })
}

fn kernel_matrix(rows: &[Vec<f64>], h: &GpHyper) -> DMatrix<f64> {
    let n = rows.len();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = sq_exp(&rows[i], &rows[j], &h.lengthscales, h.signal_variance);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
        k[(i, i)] += h.noise_variance;
    }
    k
}

fn build(p: &Prepared, hyper: GpHyper) -> Result<GpModel, FitError> {
    let k = kernel_matrix(&p.rows, &hyper);
    let (chol, jitter) = linalg::cholesky_with_jitter(&k)?;
    let alpha = chol.solve(&p.y);
    Ok(GpModel {
        x_train: p.x.clone(),
        y_train: p.y.clone(),
        hyper,
        jitter,
        chol,
        alpha,
        y_mean: p.mean,
        y_std: p.std,
    })
}

/// Fit a GP with the given hyperparameters (no optimization).
pub fn fit_gp_with(data: &Dataset, hyper: GpHyper) -> Result<GpModel, FitError> {
    assert_eq!(
        hyper.lengthscales.len(),
        data.dim(),
        "one lengthscale per dimension"
    );
    let p = prepare(data)?;
    build(&p, hyper)
}

/// Fit a GP whose hyperparameters maximize the log marginal likelihood.
///
/// Deterministic given `seed`.
pub fn fit_gp(data: &Dataset, noise: NoiseMode, seed: u64) -> Result<GpModel, FitError> {
    let p = prepare(data)?;
    let dim = data.dim();

    // search space in natural-log coordinates: [ln l_1..ln l_d, ln s2, (ln noise)]
    let mut lo = Vec::with_capacity(dim + 2);
    let mut hi = Vec::with_capacity(dim + 2);
    for j in 0..dim {
        let col = p.x.column(j);
        let range = col.max() - col.min();
        let w = if range > 0.0 { range } else { 1.0 };
        lo.push(libm::log(LENGTHSCALE_RANGE.0 * w));
        hi.push(libm::log(LENGTHSCALE_RANGE.1 * w));
    }
    lo.push(libm::log(SIGNAL_VARIANCE_RANGE.0));
    hi.push(libm::log(SIGNAL_VARIANCE_RANGE.1));
    let estimate_noise = matches!(noise, NoiseMode::Estimated);
    if estimate_noise {
        lo.push(libm::log(NOISE_VARIANCE_RANGE.0));
        hi.push(libm::log(NOISE_VARIANCE_RANGE.1));
    }
    let fixed_noise = match noise {
        NoiseMode::Fixed(v) => v,
        NoiseMode::Estimated => 0.0,
    };

    let decode = |theta: &[f64]| GpHyper {
        lengthscales: theta[..dim].iter().map(|v| libm::exp(*v)).collect(),
        signal_variance: libm::exp(theta[dim]),
        noise_variance: if estimate_noise {
            libm::exp(theta[dim + 1])
        } else {
            fixed_noise
        },
    };
    let score = |theta: &[f64]| -> f64 {
        let h = decode(theta);
        let k = kernel_matrix(&p.rows, &h);
        match linalg::cholesky_with_jitter(&k) {
            Ok((c, _)) => {
                let v = lml_from(&c, &p.y).total();
                if v.is_finite() {
                    v
                } else {
                    f64::NEG_INFINITY
                }
            }
            Err(_) => f64::NEG_INFINITY,
        }
    };

    let mut rng = rng::from_seed(seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in 0..HYPER_STARTS {
        let theta: Vec<f64> = if start == 0 {
            // lengthscale = data range / 3, unit signal variance, small noise
            let mut t: Vec<f64> = (0..dim)
                .map(|j| 0.5 * (lo[j] + hi[j]) - libm::log(3.0))
                .collect();
            t.push(0.0);
            if estimate_noise {
                t.push(libm::log(1e-4));
            }
            t
        } else {
            lo.iter()
                .zip(&hi)
                .map(|(a, b)| a + (b - a) * rng.random::<f64>())
                .collect()
        };
        let s = score(&theta);
        if best.as_ref().is_none_or(|(_, b)| s > *b) {
            best = Some((theta, s));
        }
    }
    let (mut theta, mut best_score) = best.expect("at least one start");

    const INV_PHI: f64 = 0.618_033_988_749_895;
    for _ in 0..REFINE_SWEEPS {
        for j in 0..theta.len() {
            let mut a = (theta[j] - GOLDEN_WINDOW).max(lo[j]);
            let mut b = (theta[j] + GOLDEN_WINDOW).min(hi[j]);
            let eval = |t: &mut Vec<f64>, v: f64| {
                t[j] = v;
                score(t)
            };
            let mut trial = theta.clone();
            let mut c = b - INV_PHI * (b - a);
            let mut d = a + INV_PHI * (b - a);
            let mut fc = eval(&mut trial, c);
            let mut fd = eval(&mut trial, d);
            for _ in 0..GOLDEN_ITERS {
                if fc > fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - INV_PHI * (b - a);
                    fc = eval(&mut trial, c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + INV_PHI * (b - a);
                    fd = eval(&mut trial, d);
                }
            }
            let (v, f) = if fc > fd { (c, fc) } else { (d, fd) };
            if f > best_score {
                theta[j] = v;
                best_score = f;
            }
        }
    }

    if !best_score.is_finite() {
        return Err(FitError::NotPositiveDefinite {
            max_jitter: linalg::JITTER_LADDER[linalg::JITTER_LADDER.len() - 1],
        });
    }
    build(&p, decode(&theta))
}

/// Terms of the log marginal likelihood in standardized units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmlTerms {
    /// `-1/2 y' K^-1 y`.
    pub data_fit: f64,
    /// `-1/2 ln det K`.
    pub complexity: f64,
    /// `-n/2 ln(2 pi)`.
    pub constant: f64,
}

impl LmlTerms {
    /// Sum of the three terms.
    pub fn total(&self) -> f64 {
        self.data_fit + self.complexity + self.constant
    }
}

fn lml_from(chol: &Cholesky<f64, Dyn>, y: &DVector<f64>) -> LmlTerms {
    let alpha = chol.solve(y);
    let n = y.len() as f64;
    let log_det_half: f64 = chol
        .l_dirty()
        .diagonal()
        .iter()
        .map(|d| libm::log(*d))
        .sum();
    LmlTerms {
        data_fit: -0.5 * y.dot(&alpha),
        complexity: -log_det_half,
        constant: -0.5 * n * libm::log(2.0 * PI),
    }
}

impl GpModel {
    /// Posterior mean and variance of the latent function at `x`, in data units.
    pub fn posterior(&self, x: &[f64]) -> (f64, f64) {
        let n = self.x_train.nrows();
        let h = &self.hyper;
        let mut ks = DVector::zeros(n);
        let mut row = alloc::vec![0.0; x.len()];
        for i in 0..n {
            for j in 0..x.len() {
                row[j] = self.x_train[(i, j)];
            }
            ks[i] = sq_exp(&row, x, &h.lengthscales, h.signal_variance);
        }
        let mu = ks.dot(&self.alpha);
        let v = self
            .chol
            .l_dirty()
            .lower_triangle()
            .solve_lower_triangular(&ks)
            .unwrap_or_else(|| DVector::zeros(n));
        let var = (h.signal_variance - v.dot(&v)).max(0.0);
        (self.y_mean + self.y_std * mu, self.y_std * self.y_std * var)
    }

    /// Posterior mean in data units.
    pub fn mean(&self, x: &[f64]) -> f64 {
        self.posterior(x).0
    }

    /// Log marginal likelihood of the standardized targets.
    pub fn log_marginal_likelihood(&self) -> f64 {
        self.lml_terms().total()
    }

    /// Log marginal likelihood split into its terms.
    pub fn lml_terms(&self) -> LmlTerms {
        lml_from(&self.chol, &self.y_train)
    }

    /// Hyperparameters.
    pub fn hyper(&self) -> &GpHyper {
        &self.hyper
    }

    /// Jitter added to the diagonal for the factorization.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Lower Cholesky factor of `K + noise I + jitter I`.
    pub fn chol_factor(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    /// The factorized matrix `K + noise I + jitter I` rebuilt from the inputs.
    pub fn kernel_matrix(&self) -> DMatrix<f64> {
        let rows: Vec<Vec<f64>> = self
            .x_train
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect();
        let mut k = kernel_matrix(&rows, &self.hyper);
        for i in 0..k.nrows() {
            k[(i, i)] += self.jitter;
        }
        k
    }

    /// `(K + noise I)^-1 y` in standardized units.
    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    /// Mean of the training targets.
    pub fn y_mean(&self) -> f64 {
        self.y_mean
    }

    /// Standard deviation used to standardize the targets.
    pub fn y_std(&self) -> f64 {
        self.y_std
    }

    /// Prior variance of the latent function in data units.
    pub fn prior_variance(&self) -> f64 {
        self.hyper.signal_variance * self.y_std * self.y_std
    }

    /// Number of (merged) training points.
    pub fn n_train(&self) -> usize {
        self.x_train.nrows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn hyper1(ls: f64, s2: f64, noise: f64) -> GpHyper {
        GpHyper {
            lengthscales: vec![ls],
            signal_variance: s2,
            noise_variance: noise,
        }
    }

    #[test]
    fn single_point_is_interpolated() {
        let d = Dataset::from_rows(vec![vec![0.0]], vec![2.0]);
        let m = fit_gp(&d, NoiseMode::Fixed(1e-10), 0).unwrap();
        assert_relative_eq!(m.mean(&[0.0]), 2.0, epsilon = 1e-6);
    }

    #[test]
    fn constant_targets_give_constant_mean() {
        let d = Dataset::from_rows(vec![vec![0.0], vec![1.0], vec![2.0]], vec![5.0; 3]);
        let m = fit_gp(&d, NoiseMode::Fixed(1e-10), 1).unwrap();
        assert_eq!(m.y_std(), 1.0);
        for x in [0.0, 0.3, 1.0, 1.7, 2.0] {
            assert_relative_eq!(m.mean(&[x]), 5.0, epsilon = 1e-6);
        }
    }

    /// Hand solve of the two-point model: standardized targets are (0, 0)
    /// after centering (both y = 1), so use y = (0, 2) instead, which
    /// standardizes to (-1, 1) with mean 1 and std 1.
    #[test]
    fn two_point_closed_form() {
        let d = Dataset::from_rows(vec![vec![-1.0], vec![1.0]], vec![0.0, 2.0]);
        let m = fit_gp_with(&d, hyper1(1.0, 1.0, 0.0)).unwrap();
        // K = [[1, e^-2], [e^-2, 1]], k* at 0 = (e^-1/2, e^-1/2)
        let r = libm::exp(-2.0);
        let kstar = libm::exp(-0.5);
        // alpha = K^-1 (-1, 1) = (-1, 1) / (1 - r); k*' alpha = 0
        let mu = 1.0 + 1.0 * 0.0;
        // var = 1 - k*' K^-1 k* = 1 - 2 kstar^2 / (1 + r)
        let var = 1.0 - 2.0 * kstar * kstar / (1.0 + r);
        let (pm, pv) = m.posterior(&[0.0]);
        assert_relative_eq!(pm, mu, epsilon = 1e-8);
        assert_relative_eq!(pv, var, epsilon = 1e-8);
        // asymmetric query, mean = 1 + k*' alpha
        let (pm, _) = m.posterior(&[0.5]);
        let k1 = libm::exp(-0.5 * 1.5 * 1.5);
        let k2 = libm::exp(-0.5 * 0.5 * 0.5);
        assert_relative_eq!(pm, 1.0 + (k2 - k1) / (1.0 - r), epsilon = 1e-8);
    }

    #[test]
    fn equal_targets_two_point_model_is_flat() {
        let d = Dataset::from_rows(vec![vec![-1.0], vec![1.0]], vec![1.0, 1.0]);
        let m = fit_gp_with(&d, hyper1(1.0, 1.0, 0.0)).unwrap();
        assert_relative_eq!(m.mean(&[0.0]), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn interpolates_training_points_without_noise() {
        let xs = [-2.0, -0.7, 0.1, 1.3, 2.4];
        let ys: Vec<f64> = xs.iter().map(|x| libm::sin(*x) * 3.0 + 1.0).collect();
        let d = Dataset::from_rows(xs.iter().map(|x| vec![*x]).collect(), ys.clone());
        let m = fit_gp_with(&d, hyper1(0.8, 1.0, 0.0)).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            let (mu, var) = m.posterior(&[*x]);
            assert!((mu - y).abs() <= 1e-6 * y.abs().max(1.0));
            assert!(var <= 1e-8);
        }
    }

    #[test]
    fn prior_recovered_far_away() {
        let d = Dataset::from_rows(vec![vec![0.0], vec![0.5], vec![1.0]], vec![1.0, 4.0, 2.0]);
        let m = fit_gp_with(&d, hyper1(0.3, 1.0, 0.0)).unwrap();
        let (mu, var) = m.posterior(&[0.3 * 10.0 + 1.0]);
        assert!((mu - m.y_mean()).abs() <= 1e-3 * m.y_std());
        assert!((var - m.prior_variance()).abs() <= 1e-3);
    }

    #[test]
    fn cholesky_reconstructs_kernel() {
        let d = Dataset::from_rows(
            vec![
                vec![0.0, 0.0],
                vec![0.3, 0.1],
                vec![0.9, 0.5],
                vec![0.2, 0.8],
            ],
            vec![1.0, 2.0, 0.5, 3.0],
        );
        let m = fit_gp(&d, NoiseMode::Estimated, 3).unwrap();
        let l = m.chol_factor();
        let k = m.kernel_matrix();
        let diff = (&l * l.transpose() - &k).norm() / k.norm();
        assert!(diff < 1e-8, "relative reconstruction error {diff}");
    }

    #[test]
    fn scalar_lml_is_standard_normal_density() {
        let d = Dataset::from_rows(vec![vec![0.0]], vec![3.0]);
        let m = fit_gp_with(&d, hyper1(1.0, 0.5, 0.5)).unwrap();
        assert_relative_eq!(
            m.log_marginal_likelihood(),
            -0.5 * libm::log(2.0 * PI),
            epsilon = 1e-9
        );
    }

    /// Points 100 lengthscales apart give K = (s2 + noise) I.
    #[test]
    fn white_noise_lml_matches_dense_formula() {
        let xs = [0.0, 100.0, 200.0, 300.0];
        let ys = [0.3, -1.2, 2.0, 0.1];
        let d = Dataset::from_rows(xs.iter().map(|x| vec![*x]).collect(), ys.to_vec());
        let dense = |total_var: f64, y: &[f64]| -> (f64, f64) {
            let n = y.len() as f64;
            let yy: f64 = y.iter().map(|v| v * v).sum();
            (-0.5 * yy / total_var, -0.5 * n * libm::log(total_var))
        };
        let a = fit_gp_with(&d, hyper1(1.0, 1e-6, 0.1)).unwrap();
        let b = fit_gp_with(&d, hyper1(1.0, 1e-6, 0.2)).unwrap();
        let ys_std: Vec<f64> = a.y_train.iter().copied().collect();
        let (fit_a, cx_a) = dense(1e-6 + 0.1 + a.jitter(), &ys_std);
        let (fit_b, cx_b) = dense(1e-6 + 0.2 + b.jitter(), &ys_std);
        let ta = a.lml_terms();
        let tb = b.lml_terms();
        assert_relative_eq!(ta.data_fit, fit_a, epsilon = 1e-10);
        assert_relative_eq!(ta.complexity, cx_a, epsilon = 1e-10);
        assert_relative_eq!(tb.total(), fit_b + cx_b + tb.constant, epsilon = 1e-10);
        // doubling the noise shrinks the data-fit penalty and grows the log-det penalty
        assert!(-tb.data_fit < -ta.data_fit);
        assert!(-tb.complexity > -ta.complexity);
        assert_eq!(a.log_marginal_likelihood(), a.log_marginal_likelihood());
    }

    #[test]
    fn variance_never_grows_with_more_data() {
        let mut xs: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![1.0, 0.5]];
        let mut ys = vec![0.0, 1.0];
        let probe = [[0.4, 0.4], [1.5, -0.5], [0.0, 1.0]];
        let h = GpHyper {
            lengthscales: vec![0.7, 0.7],
            signal_variance: 1.0,
            noise_variance: 0.0,
        };
        let m0 = fit_gp_with(&Dataset::from_rows(xs.clone(), ys.clone()), h.clone()).unwrap();
        let mut prev: Vec<f64> = probe
            .iter()
            .map(|p| m0.posterior(p).1 / (m0.y_std() * m0.y_std()))
            .collect();
        for extra in [[0.5, 0.2], [-0.3, 0.9], [1.2, 1.1]] {
            xs.push(extra.to_vec());
            ys.push(extra[0] - extra[1]);
            let m = fit_gp_with(&Dataset::from_rows(xs.clone(), ys.clone()), h.clone()).unwrap();
            for (k, p) in probe.iter().enumerate() {
                // variance in standardized units; y_std changes between fits
                let v = m.posterior(p).1 / (m.y_std() * m.y_std());
                assert!(v <= prev[k] + 1e-8, "variance grew at {p:?}");
                prev[k] = v;
            }
        }
    }

    #[test]
    fn fit_is_deterministic() {
        let d = Dataset::from_rows(
            (0..6)
                .map(|i| vec![i as f64 * 0.37, (i * i) as f64 * 0.1])
                .collect(),
            (0..6).map(|i| libm::cos(i as f64)).collect(),
        );
        let a = fit_gp(&d, NoiseMode::Estimated, 11).unwrap();
        let b = fit_gp(&d, NoiseMode::Estimated, 11).unwrap();
        assert_eq!(a.hyper(), b.hyper());
        assert_eq!(a.posterior(&[0.5, 0.5]), b.posterior(&[0.5, 0.5]));
    }
}

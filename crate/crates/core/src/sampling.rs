use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::RngExt;

use crate::error::ConfigError;
use crate::problem::Bounds;
use crate::rng::{self, Rng};

/// Latin hypercube design of `n` points in `bounds`.
///
/// In every dimension each of the `n` equal-width strata holds exactly one
/// point. The design is a pure function of `(bounds, n, seed)`.
pub fn latin_hypercube(bounds: &Bounds, n: usize, seed: u64) -> Result<Vec<Vec<f64>>, ConfigError> {
    latin_hypercube_with(bounds, n, &mut rng::from_seed(seed))
}

/// [`latin_hypercube`] drawing from an existing generator.
pub fn latin_hypercube_with(
    bounds: &Bounds,
    n: usize,
    rng: &mut Rng,
) -> Result<Vec<Vec<f64>>, ConfigError> {
    if n == 0 {
        return Err(ConfigError::Invalid("latin hypercube needs n >= 1".into()));
    }
    let dim = bounds.dim();
    let mut points = alloc::vec![alloc::vec![0.0; dim]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for d in 0..dim {
        strata.shuffle(rng);
        let (lo, w) = (bounds.lower()[d], bounds.width(d));
        for (p, s) in points.iter_mut().zip(&strata) {
            let u: f64 = rng.random();
            // u < 1 keeps the point inside its own stratum
            p[d] = lo + w * ((*s as f64 + u) / n as f64);
        }
    }
    Ok(points)
}

/// Stratum index of `v` for `n` strata of the interval `[lo, lo + width]`.
#[cfg(test)]
pub(crate) fn stratum(v: f64, lo: f64, width: f64, n: usize) -> usize {
    let s = ((v - lo) / width * n as f64) as usize;
    s.min(n - 1)
}

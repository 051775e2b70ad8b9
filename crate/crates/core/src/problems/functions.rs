//! Unconstrained test functions. All have minimum value 0.

use core::f64::consts::PI;

/// Ackley constant `a`.
pub const ACKLEY_A: f64 = 20.0;
/// Ackley constant `b`.
pub const ACKLEY_B: f64 = 0.2;
/// Ackley constant `c`.
pub const ACKLEY_C: f64 = 2.0 * PI;
/// Coupling constant of [`quadratic_ill`].
pub const QUADRATIC_A: f64 = 1.9;

/// Ackley function, minimum at the origin.
pub fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sq: f64 = x.iter().map(|v| v * v).sum();
    let cs: f64 = x.iter().map(|v| libm::cos(ACKLEY_C * v)).sum();
    -ACKLEY_A * libm::exp(-ACKLEY_B * libm::sqrt(sq / n)) - libm::exp(cs / n)
        + ACKLEY_A
        + core::f64::consts::E
}

/// Levy function with `w_i = 1 + (x_i - 1)/4`, minimum at `(1, ..., 1)`.
pub fn levy(x: &[f64]) -> f64 {
    let w = |v: f64| 1.0 + (v - 1.0) / 4.0;
    let n = x.len();
    let w1 = w(x[0]);
    let wn = w(x[n - 1]);
    let mut s = sin2(PI * w1);
    for v in &x[..n - 1] {
        let wi = w(*v);
        s += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * sin2(PI * wi + 1.0));
    }
    s + (wn - 1.0) * (wn - 1.0) * (1.0 + sin2(2.0 * PI * wn))
}

fn sin2(v: f64) -> f64 {
    let s = libm::sin(v);
    s * s
}

/// Rosenbrock function, minimum at `(1, ..., 1)`.
pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|p| {
            let a = p[1] - p[0] * p[0];
            let b = 1.0 - p[0];
            100.0 * a * a + b * b
        })
        .sum()
}

/// Ill-conditioned convex quadratic `sum_i (i x_i)^2 + (a i / n) x_i x_n`,
/// minimum at the origin.
pub fn quadratic_ill(x: &[f64]) -> f64 {
    let n = x.len();
    let xn = x[n - 1];
    x.iter()
        .enumerate()
        .map(|(k, v)| {
            let i = (k + 1) as f64;
            (i * v) * (i * v) + QUADRATIC_A * i / n as f64 * v * xn
        })
        .sum()
}

/// Matyas-type objective used by the constrained suite.
pub fn matyas(x: &[f64]) -> f64 {
    0.26 * (x[0] * x[0] + x[1] * x[1]) - 0.48 * x[0] * x[1]
}

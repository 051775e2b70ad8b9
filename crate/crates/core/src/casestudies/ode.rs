//! Fixed-step classical Runge-Kutta integration of small dense systems.

use alloc::vec::Vec;

use crate::error::SimError;

/// One RK4 step of `y' = f(t, y)`.
pub fn rk4_step<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    h: f64,
) -> [f64; N] {
    let shift = |y: &[f64; N], k: &[f64; N], s: f64| -> [f64; N] {
        core::array::from_fn(|i| y[i] + s * k[i])
    };
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &shift(y, &k1, 0.5 * h));
    let k3 = f(t + 0.5 * h, &shift(y, &k2, 0.5 * h));
    let k4 = f(t + h, &shift(y, &k3, h));
    core::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Integrate from `t0` over `duration` with step `dt` (the last step is
/// shortened to land on `t0 + duration`). `valid` is checked after every
/// step; the first invalid state aborts with [`SimError::Blowup`].
pub fn integrate<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    dt: f64,
    duration: f64,
    valid: &impl Fn(&[f64; N]) -> bool,
) -> Result<[f64; N], SimError> {
    if !(dt > 0.0) || !(duration >= 0.0) {
        return Err(SimError::Invalid(
            "integration step and duration must be positive".into(),
        ));
    }
    let steps = libm::ceil(duration / dt - 1e-9).max(0.0) as usize;
    let mut y = y0;
    let mut t = t0;
    for k in 0..steps {
        let h = if k + 1 == steps {
            t0 + duration - t
        } else {
            dt
        };
        y = rk4_step(f, t, &y, h);
        t += h;
        if !y.iter().all(|v| v.is_finite()) || !valid(&y) {
            return Err(SimError::Blowup { time: t });
        }
    }
    Ok(y)
}

/// Integrate under piecewise-constant inputs, one per `interval`, and
/// return the state at the end of every interval (`controls.len() + 1`
/// states including `y0`).
pub fn integrate_schedule<const N: usize, U>(
    f: &impl Fn(&[f64; N], &U) -> [f64; N],
    y0: [f64; N],
    controls: &[U],
    dt: f64,
    interval: f64,
    valid: &impl Fn(&[f64; N]) -> bool,
) -> Result<Vec<[f64; N]>, SimError> {
    let mut out = Vec::with_capacity(controls.len() + 1);
    out.push(y0);
    let mut y = y0;
    for (k, u) in controls.iter().enumerate() {
        y = integrate(
            &|_, s: &[f64; N]| f(s, u),
            k as f64 * interval,
            y,
            dt,
            interval,
            valid,
        )?;
        out.push(y);
    }
    Ok(out)
}

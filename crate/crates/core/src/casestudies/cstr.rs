//! Jacketed CSTR running `A -> B -> C`, with reactor temperature held at a
//! stepped setpoint by a gain-scheduled PID controller acting on the feed
//! flow and the jacket temperature.
//!
//! The 32 decision variables are laid out as 4 setpoint segments x 2
//! manipulated variables (`F_in`, `T_c`) x (`K_p`, `K_i`, `K_d`, bias), all
//! normalized: the bias lies in `[0, 1]` across the actuator range and the
//! gains in `[-1, 1]` are scaled by the actuator range over an error scale.

use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::newton::{steady_state, SteadyStateOptions};
use super::ode;
use crate::error::{ConfigError, SimError};
use crate::problem::{Bounds, NoiseSpec, Problem};
use crate::rng;

/// Number of PID parameters.
pub const N_GAINS: usize = 32;
/// Setpoint segments.
pub const N_SEGMENTS: usize = 4;
/// Parameters per segment and manipulated variable.
const PER_MV: usize = 4;

/// Physical constants of the reactor, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CstrParams {
    /// Reactor volume (m^3).
    pub v: f64,
    /// Density (kg/m^3).
    pub rho: f64,
    /// Heat capacity (J/(kg K)).
    pub cp: f64,
    /// Jacket heat-transfer coefficient times area (W/K).
    pub ua: f64,
    /// Feed temperature (K).
    pub tf: f64,
    /// Feed concentration of A (mol/m^3).
    pub caf: f64,
    /// Heat released by `A -> B` (J/mol); positive heats the reactor.
    pub dh_ab: f64,
    /// Heat released by `B -> C` (J/mol); positive heats the reactor.
    pub dh_bc: f64,
    /// Activation energy of `A -> B` (J/mol).
    pub e_ab: f64,
    /// Activation energy of `B -> C` (J/mol).
    pub e_bc: f64,
    /// Pre-exponential factor of `A -> B` (1/s).
    pub k0_ab: f64,
    /// Pre-exponential factor of `B -> C` (1/s).
    pub k0_bc: f64,
    /// Gas constant (J/(mol K)).
    pub r: f64,
}

impl Default for CstrParams {
    fn default() -> Self {
        Self {
            v: 0.1,
            rho: 1000.0,
            cp: 239.0,
            ua: 833.33,
            tf: 350.0,
            caf: 1000.0,
            dh_ab: 2.0e4,
            dh_bc: 1.0e4,
            e_ab: 8750.0 * 8.314,
            e_bc: 10000.0 * 8.314,
            k0_ab: 1.2e9,
            k0_bc: 1.28e10,
            r: 8.314,
        }
    }
}

impl CstrParams {
    fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            self.v, self.rho, self.cp, self.ua, self.tf, self.caf, self.e_ab, self.e_bc,
            self.k0_ab, self.k0_bc, self.r,
        ];
        if positive.iter().all(|v| *v > 0.0 && v.is_finite())
            && self.dh_ab.is_finite()
            && self.dh_bc.is_finite()
        {
            Ok(())
        } else {
            Err(ConfigError::Invalid(
                "CSTR parameters must be finite and positive".into(),
            ))
        }
    }
}

/// Reactor state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CstrState {
    /// Concentration of A (mol/m^3).
    pub ca: f64,
    /// Concentration of B (mol/m^3).
    pub cb: f64,
    /// Temperature (K).
    pub t: f64,
}

impl CstrState {
    fn to_array(self) -> [f64; 3] {
        [self.ca, self.cb, self.t]
    }

    fn from_array(a: [f64; 3]) -> Self {
        Self {
            ca: a[0],
            cb: a[1],
            t: a[2],
        }
    }
}

/// Manipulated variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Controls {
    /// Feed flow (m^3/s).
    pub f_in: f64,
    /// Jacket temperature (K).
    pub tc: f64,
}

/// Actuator ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Actuators {
    /// Feed flow range (m^3/s).
    pub f_in: (f64, f64),
    /// Jacket temperature range (K).
    pub tc: (f64, f64),
}

impl Default for Actuators {
    fn default() -> Self {
        Self {
            f_in: (0.5e-3, 3.0e-3),
            tc: (280.0, 320.0),
        }
    }
}

impl Actuators {
    fn range(&self, mv: usize) -> (f64, f64) {
        if mv == 0 {
            self.f_in
        } else {
            self.tc
        }
    }
}

/// Simulation and objective settings of the PID tuning problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CstrConfig {
    /// Reactor constants.
    pub params: CstrParams,
    /// Actuator ranges.
    pub actuators: Actuators,
    /// Temperature setpoint of each segment (K).
    pub setpoints: Vec<f64>,
    /// Duration of each setpoint segment (s).
    pub segment_duration: f64,
    /// Controller sampling interval (s).
    pub control_interval: f64,
    /// RK4 step (s).
    pub dt: f64,
    /// State at `t = 0`.
    pub initial: CstrState,
    /// Weight of squared normalized control moves.
    pub lambda_u: f64,
    /// Temperature error (K) mapped to a full actuator swing by a unit gain.
    pub error_scale: f64,
    /// Integral time scale (s) of the normalized integral gain.
    pub tau_i: f64,
    /// Derivative time scale (s) of the normalized derivative gain.
    pub tau_d: f64,
    /// Objective assigned to failed simulations.
    pub failure_penalty: f64,
    /// Standard deviation of the additive objective noise.
    pub noise_sigma: f64,
}

impl Default for CstrConfig {
    fn default() -> Self {
        Self {
            params: CstrParams::default(),
            actuators: Actuators::default(),
            setpoints: alloc::vec![330.0, 340.0, 320.0, 330.0],
            segment_duration: 600.0,
            control_interval: 10.0,
            dt: 1.0,
            initial: CstrState {
                ca: 500.0,
                cb: 0.0,
                t: 330.0,
            },
            lambda_u: 0.01,
            error_scale: 10.0,
            tau_i: 100.0,
            tau_d: 10.0,
            failure_penalty: 1.0e6,
            noise_sigma: 10.0,
        }
    }
}

impl CstrConfig {
    /// Check ranges and that the horizon is a whole number of control intervals.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.params.validate()?;
        if self.setpoints.len() != N_SEGMENTS {
            return Err(ConfigError::Invalid(
                "CSTR schedule needs exactly 4 setpoints".into(),
            ));
        }
        let steps = self.segment_duration / self.control_interval;
        if !(self.dt > 0.0
            && self.control_interval > 0.0
            && steps >= 1.0
            && (steps - libm::round(steps)).abs() < 1e-9)
        {
            return Err(ConfigError::Invalid(
                "segment duration must be a positive multiple of the control interval".into(),
            ));
        }
        for (lo, hi) in [self.actuators.f_in, self.actuators.tc] {
            if !(lo < hi) {
                return Err(ConfigError::Invalid(
                    "actuator range must satisfy lo < hi".into(),
                ));
            }
        }
        if !(self.error_scale > 0.0
            && self.tau_i > 0.0
            && self.tau_d >= 0.0
            && self.lambda_u >= 0.0
            && self.noise_sigma >= 0.0)
        {
            return Err(ConfigError::Invalid(
                "CSTR scaling constants out of range".into(),
            ));
        }
        Ok(())
    }

    fn steps_per_segment(&self) -> usize {
        libm::round(self.segment_duration / self.control_interval) as usize
    }
}

fn rates(s: &[f64; 3], p: &CstrParams) -> (f64, f64) {
    let ra = p.k0_ab * libm::exp(-p.e_ab / (p.r * s[2])) * s[0];
    let rb = p.k0_bc * libm::exp(-p.e_bc / (p.r * s[2])) * s[1];
    (ra, rb)
}

fn rhs(s: &[f64; 3], u: &Controls, p: &CstrParams) -> [f64; 3] {
    let (ra, rb) = rates(s, p);
    let d = u.f_in / p.v;
    let rcp = p.rho * p.cp;
    [
        d * (p.caf - s[0]) - ra,
        -d * s[1] + ra - rb,
        d * (p.tf - s[2])
            + p.dh_ab / rcp * ra
            + p.dh_bc / rcp * rb
            + p.ua / (p.v * rcp) * (u.tc - s[2]),
    ]
}

/// Time derivative `(dCA/dt, dCB/dt, dT/dt)`.
pub fn cstr_rhs(
    state: &CstrState,
    controls: &Controls,
    params: &CstrParams,
) -> Result<CstrState, SimError> {
    let s = state.to_array();
    if !s.iter().all(|v| v.is_finite()) || !(state.t > 0.0) {
        return Err(SimError::Invalid(
            "non-finite or non-positive CSTR state".into(),
        ));
    }
    Ok(CstrState::from_array(rhs(&s, controls, params)))
}

fn physical(s: &[f64; 3]) -> bool {
    s[0] >= -1e-9 && s[1] >= -1e-9 && s[2] > 0.0 && s[2].abs() <= 1e6
}

/// State after holding `controls` for `duration` seconds.
pub fn integrate(
    state: &CstrState,
    controls: &Controls,
    params: &CstrParams,
    dt: f64,
    duration: f64,
) -> Result<CstrState, SimError> {
    let f = |_: f64, s: &[f64; 3]| rhs(s, controls, params);
    ode::integrate(&f, 0.0, state.to_array(), dt, duration, &physical).map(CstrState::from_array)
}

/// Steady state under constant controls, started from `guess`.
pub fn steady_state_at(
    controls: &Controls,
    params: &CstrParams,
    guess: &CstrState,
) -> Result<CstrState, SimError> {
    let r = |x: &[f64]| rhs(&[x[0], x[1], x[2]], controls, params).to_vec();
    let x = steady_state(
        r,
        &guess.to_array(),
        |x| x[0] >= 0.0 && x[1] >= 0.0 && x[2] > 0.0,
        &SteadyStateOptions::default(),
    )?;
    Ok(CstrState::from_array([x[0], x[1], x[2]]))
}

/// Physical PID parameters of one manipulated variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidTerm {
    /// Proportional gain (actuator units per K).
    pub kp: f64,
    /// Integral gain (actuator units per K s).
    pub ki: f64,
    /// Derivative gain (actuator units s per K).
    pub kd: f64,
    /// Output at zero error (actuator units).
    pub bias: f64,
}

/// The 32 normalized controller parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PidGains {
    theta: [f64; N_GAINS],
}

impl PidGains {
    /// Wrap a 32-vector.
    pub fn new(theta: &[f64]) -> Result<Self, ConfigError> {
        let theta: [f64; N_GAINS] = theta.try_into().map_err(|_| {
            ConfigError::Invalid(alloc::format!(
                "PID gain vector needs 32 entries, got {}",
                theta.len()
            ))
        })?;
        Ok(Self { theta })
    }

    /// Raw normalized vector.
    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }

    /// Index of `(segment, mv, param)`; `mv` 0 is `F_in`, 1 is `T_c`;
    /// `param` 0..4 is `K_p`, `K_i`, `K_d`, bias.
    pub fn index(segment: usize, mv: usize, param: usize) -> usize {
        (segment * 2 + mv) * PER_MV + param
    }

    /// Physical PID parameters of `mv` during `segment`.
    pub fn term(&self, segment: usize, mv: usize, cfg: &CstrConfig) -> PidTerm {
        let (lo, hi) = cfg.actuators.range(mv);
        let span = hi - lo;
        let t = |p| self.theta[Self::index(segment, mv, p)];
        PidTerm {
            kp: t(0) * span / cfg.error_scale,
            ki: t(1) * span / (cfg.error_scale * cfg.tau_i),
            kd: t(2) * span * cfg.tau_d / cfg.error_scale,
            bias: lo + t(3) * span,
        }
    }

    /// Box of the normalized parameters: gains in `[-1, 1]`, biases in `[0, 1]`.
    pub fn bounds() -> Bounds {
        let mut lo = alloc::vec![-1.0; N_GAINS];
        let hi = alloc::vec![1.0; N_GAINS];
        for k in 0..N_SEGMENTS * 2 {
            lo[k * PER_MV + 3] = 0.0;
        }
        Bounds::new(lo, hi).expect("static bounds")
    }
}

/// PID output `bias + K_p e + K_i int(e) + K_d de/dt` clipped to `range`.
pub fn pid_control(
    term: &PidTerm,
    e: f64,
    integral: f64,
    derivative: f64,
    range: (f64, f64),
) -> f64 {
    (term.bias + term.kp * e + term.ki * integral + term.kd * derivative).clamp(range.0, range.1)
}

/// Closed-loop record sampled at every control instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoop {
    /// Sampling times (s).
    pub times: Vec<f64>,
    /// Reactor temperature at each sampling time, before the control update.
    pub temperatures: Vec<f64>,
    /// Setpoint at each sampling time.
    pub setpoints: Vec<f64>,
    /// Controls applied from each sampling time on.
    pub controls: Vec<Controls>,
    /// Final state.
    pub final_state: CstrState,
}

impl ClosedLoop {
    /// `sum e^2 + lambda_u sum |du|^2` with moves normalized by the actuator ranges.
    pub fn cost(&self, cfg: &CstrConfig) -> f64 {
        let tracking: f64 = self
            .temperatures
            .iter()
            .zip(&self.setpoints)
            .map(|(t, sp)| (sp - t) * (sp - t))
            .sum();
        let (f_lo, f_hi) = cfg.actuators.f_in;
        let (t_lo, t_hi) = cfg.actuators.tc;
        let moves: f64 = self
            .controls
            .windows(2)
            .map(|w| {
                let df = (w[1].f_in - w[0].f_in) / (f_hi - f_lo);
                let dt = (w[1].tc - w[0].tc) / (t_hi - t_lo);
                df * df + dt * dt
            })
            .sum();
        tracking + cfg.lambda_u * moves
    }
}

/// Simulate the closed loop over the whole setpoint schedule.
///
/// The integral of the error restarts at each segment; the derivative is
/// the backward difference of the error over one control interval, zero
/// at the first sample of a segment.
pub fn simulate(gains: &PidGains, cfg: &CstrConfig) -> Result<ClosedLoop, SimError> {
    cfg.validate()
        .map_err(|e| SimError::Invalid(alloc::format!("{e}")))?;
    let per = cfg.steps_per_segment();
    let n = per * N_SEGMENTS;
    let h = cfg.control_interval;
    let mut out = ClosedLoop {
        times: Vec::with_capacity(n),
        temperatures: Vec::with_capacity(n),
        setpoints: Vec::with_capacity(n),
        controls: Vec::with_capacity(n),
        final_state: cfg.initial,
    };
    let mut state = cfg.initial;
    for seg in 0..N_SEGMENTS {
        let terms = [gains.term(seg, 0, cfg), gains.term(seg, 1, cfg)];
        let sp = cfg.setpoints[seg];
        let mut integral = 0.0;
        let mut prev_e = None;
        for k in 0..per {
            let e = sp - state.t;
            integral += e * h;
            let derivative = prev_e.map_or(0.0, |p| (e - p) / h);
            prev_e = Some(e);
            let u = Controls {
                f_in: pid_control(&terms[0], e, integral, derivative, cfg.actuators.f_in),
                tc: pid_control(&terms[1], e, integral, derivative, cfg.actuators.tc),
            };
            out.times.push((seg * per + k) as f64 * h);
            out.temperatures.push(state.t);
            out.setpoints.push(sp);
            out.controls.push(u);
            state = integrate(&state, &u, &cfg.params, cfg.dt, h)?;
        }
    }
    out.final_state = state;
    Ok(out)
}

/// Noise-free tuning objective; failed simulations score `failure_penalty`.
pub fn cstr_cost(theta: &[f64], cfg: &CstrConfig) -> f64 {
    let Ok(gains) = PidGains::new(theta) else {
        return cfg.failure_penalty;
    };
    match simulate(&gains, cfg) {
        Ok(run) => {
            let c = run.cost(cfg);
            if c.is_finite() {
                c.min(cfg.failure_penalty)
            } else {
                cfg.failure_penalty
            }
        }
        Err(_) => cfg.failure_penalty,
    }
}

/// Tuning objective plus Gaussian observation noise drawn from `seed`.
pub fn cstr_objective(theta: &[f64], cfg: &CstrConfig, noise: NoiseSpec, seed: u64) -> f64 {
    let clean = cstr_cost(theta, cfg);
    if !noise.is_noisy() {
        return clean;
    }
    let mut r = rng::stream(seed, rng::Stream::Noise);
    let z: f64 = StandardNormal.sample(&mut r);
    clean + noise.sigma * z
}

/// The PID tuning task as a 32-dimensional black-box problem.
pub fn cstr_problem(cfg: &CstrConfig) -> Result<Problem, ConfigError> {
    cfg.validate()?;
    let c = cfg.clone();
    Ok(
        Problem::from_fn("cstr-pid", PidGains::bounds(), move |x| cstr_cost(x, &c))
            .with_noise(NoiseSpec::gaussian(cfg.noise_sigma)),
    )
}

//! Steady-state Williams-Otto reactor.
//!
//! Reactions `A + B -> C`, `B + C -> P + E`, `C + P -> G` with rates
//! `r1 = k1 wA wB`, `r2 = k2 wB wC`, `r3 = k3 wC wP` (mass-fraction basis,
//! `k_i = a_i exp(-b_i / T)` with `T` in kelvin). Pure A and pure B feeds;
//! the outlet has the reactor composition. The decision variables are the
//! reactor temperature and the B feed rate; A feed and holdup are fixed.

use serde::{Deserialize, Serialize};

use super::newton::{residual_norm, steady_state, SteadyStateOptions};
use crate::error::{ConfigError, SimError};
use crate::problem::{Bounds, Problem};

/// Component order of [`WoState::w`].
pub const COMPONENTS: [&str; 6] = ["A", "B", "C", "E", "G", "P"];
const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const E: usize = 3;
const G: usize = 4;
const P: usize = 5;

/// Kinetics, holdup, feed and prices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WoParams {
    /// Pre-exponential factors of the three reactions (1/s).
    pub k0: [f64; 3],
    /// Activation temperatures `E_i / R` (K).
    pub activation: [f64; 3],
    /// Reactor holdup (kg).
    pub holdup: f64,
    /// A feed rate (kg/s).
    pub feed_a: f64,
    /// Value of P in the product stream ($/kg).
    pub price_p: f64,
    /// Value of E in the product stream ($/kg).
    pub price_e: f64,
    /// Cost of A feed ($/kg).
    pub cost_a: f64,
    /// Cost of B feed ($/kg).
    pub cost_b: f64,
}

impl Default for WoParams {
    fn default() -> Self {
        Self {
            k0: [1.6599e6, 7.2117e8, 2.6745e12],
            activation: [6666.7, 8333.3, 11111.0],
            holdup: 2105.0,
            feed_a: 1.8275,
            price_p: 1143.38,
            price_e: 25.92,
            cost_a: 76.23,
            cost_b: 114.34,
        }
    }
}

/// Operating box, constraint limits and failure handling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WoConfig {
    /// Kinetics and economics.
    pub params: WoParams,
    /// Reactor temperature range (K).
    pub t_r: (f64, f64),
    /// B feed range (kg/s).
    pub feed_b: (f64, f64),
    /// Upper limit on the outlet mass fraction of A.
    pub w_a_max: f64,
    /// Upper limit on the outlet mass fraction of G.
    pub w_g_max: f64,
    /// Objective reported when the steady state cannot be found.
    pub failure_penalty: f64,
}

impl Default for WoConfig {
    fn default() -> Self {
        Self {
            params: WoParams::default(),
            t_r: (343.15, 373.15),
            feed_b: (4.0, 7.0),
            w_a_max: 0.12,
            w_g_max: 0.08,
            failure_penalty: 1.0e6,
        }
    }
}

impl WoConfig {
    /// Check ranges.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let p = &self.params;
        let ok = p.k0.iter().chain(&p.activation).all(|v| *v >= 0.0)
            && p.holdup > 0.0
            && p.feed_a > 0.0
            && self.t_r.0 > 0.0
            && self.t_r.0 < self.t_r.1
            && self.feed_b.0 > 0.0
            && self.feed_b.0 < self.feed_b.1;
        if ok {
            Ok(())
        } else {
            Err(ConfigError::Invalid(
                "Williams-Otto settings out of range".into(),
            ))
        }
    }
}

/// Reactor operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WoState {
    /// Mass fractions in [`COMPONENTS`] order.
    pub w: [f64; 6],
    /// Reactor temperature (K).
    pub t_r: f64,
    /// B feed rate (kg/s).
    pub feed_b: f64,
}

impl WoParams {
    /// Rate constants at temperature `t` (K).
    pub fn rate_constants(&self, t: f64) -> [f64; 3] {
        core::array::from_fn(|i| self.k0[i] * libm::exp(-self.activation[i] / t))
    }
}

/// Component balances `in - out + generation` (kg/s); zero at steady state.
pub fn wo_residuals(state: &WoState, params: &WoParams) -> [f64; 6] {
    let w = &state.w;
    let [k1, k2, k3] = params.rate_constants(state.t_r);
    let m = params.holdup;
    let r1 = k1 * w[A] * w[B] * m;
    let r2 = k2 * w[B] * w[C] * m;
    let r3 = k3 * w[C] * w[P] * m;
    let f = params.feed_a + state.feed_b;
    let mut res = [0.0; 6];
    res[A] = params.feed_a - f * w[A] - r1;
    res[B] = state.feed_b - f * w[B] - r1 - r2;
    res[C] = -f * w[C] + 2.0 * r1 - 2.0 * r2 - r3;
    res[E] = -f * w[E] + 2.0 * r2;
    res[G] = -f * w[G] + 1.5 * r3;
    res[P] = -f * w[P] + r2 - 0.5 * r3;
    res
}

/// Overall balance `F_A + F_B - F sum(w)`; equals the sum of the component residuals.
pub fn wo_total_balance(state: &WoState, params: &WoParams) -> f64 {
    let f = params.feed_a + state.feed_b;
    params.feed_a + state.feed_b - f * state.w.iter().sum::<f64>()
}

/// Steady-state composition at `(t_r, feed_b)`.
pub fn wo_steady_state(t_r: f64, feed_b: f64, params: &WoParams) -> Result<WoState, SimError> {
    let f = params.feed_a + feed_b;
    let mut guess = [0.0; 6];
    guess[A] = params.feed_a / f;
    guess[B] = feed_b / f;
    let r = |w: &[f64]| {
        let s = WoState {
            w: [w[0], w[1], w[2], w[3], w[4], w[5]],
            t_r,
            feed_b,
        };
        wo_residuals(&s, params).to_vec()
    };
    let admissible = |w: &[f64]| w.iter().all(|v| (-1e-9..=1.0 + 1e-9).contains(v));
    let w = steady_state(r, &guess, admissible, &SteadyStateOptions::default())?;
    Ok(WoState {
        w: [w[0], w[1], w[2], w[3], w[4], w[5]],
        t_r,
        feed_b,
    })
}

/// Profit rate `price_p F wP + price_e F wE - cost_a F_A - cost_b F_B`.
pub fn wo_profit(state: &WoState, params: &WoParams) -> f64 {
    let f = params.feed_a + state.feed_b;
    params.price_p * f * state.w[P] + params.price_e * f * state.w[E]
        - params.cost_a * params.feed_a
        - params.cost_b * state.feed_b
}

/// Negated profit and `g = (wA - w_a_max, wG - w_g_max)`. When the steady
/// state cannot be found the penalty is returned with `g = (1, 1)`.
pub fn wo_objective(t_r: f64, feed_b: f64, cfg: &WoConfig) -> (f64, [f64; 2]) {
    match wo_steady_state(t_r, feed_b, &cfg.params) {
        Ok(s) if residual_norm(&wo_residuals(&s, &cfg.params)) < 1e-8 => (
            -wo_profit(&s, &cfg.params),
            [s.w[A] - cfg.w_a_max, s.w[G] - cfg.w_g_max],
        ),
        _ => (cfg.failure_penalty, [1.0, 1.0]),
    }
}

/// The reactor as a 2-D constrained black box over `(T_R, F_B)`.
pub fn wo_problem(cfg: &WoConfig) -> Result<Problem, ConfigError> {
    cfg.validate()?;
    let bounds = Bounds::new(
        alloc::vec![cfg.t_r.0, cfg.feed_b.0],
        alloc::vec![cfg.t_r.1, cfg.feed_b.1],
    )?;
    let c = *cfg;
    Ok(Problem::from_constrained_fn(
        "williams-otto",
        bounds,
        2,
        move |x| {
            let (f, g) = wo_objective(x[0], x[1], &c);
            (f, g.to_vec())
        },
    ))
}

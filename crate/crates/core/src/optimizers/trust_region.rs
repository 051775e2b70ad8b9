//! Trust-region bookkeeping and merit functions shared by the local methods.

use alloc::vec::Vec;

/// Radius adaptation thresholds.
const GOOD_RATIO: f64 = 0.75;
const BAD_RATIO: f64 = 0.25;

/// Center, radius and step statistics of a trust-region method.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustRegionState {
    /// Incumbent `x_k`.
    pub center: Vec<f64>,
    /// Observed merit at the center.
    pub center_merit: f64,
    /// Current radius.
    pub radius: f64,
    /// Steps that moved the center.
    pub success_count: usize,
    /// Steps that did not.
    pub fail_count: usize,
    /// Smallest radius.
    pub min_radius: f64,
    /// Largest radius.
    pub max_radius: f64,
}

/// Radius settings as fractions of the largest box width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusConfig {
    /// Initial radius.
    pub initial: f64,
    /// Smallest radius.
    pub min: f64,
    /// Largest radius.
    pub max: f64,
}

impl Default for RadiusConfig {
    fn default() -> Self {
        Self {
            initial: 0.1,
            min: 1e-6,
            max: 1.0,
        }
    }
}

impl TrustRegionState {
    /// State at `center` with merit `merit`; radii are `cfg` times `width`.
    pub fn new(center: Vec<f64>, merit: f64, cfg: &RadiusConfig, width: f64) -> Self {
        let min_radius = cfg.min * width;
        let max_radius = cfg.max * width;
        Self {
            center,
            center_merit: merit,
            radius: (cfg.initial * width).clamp(min_radius, max_radius),
            success_count: 0,
            fail_count: 0,
            min_radius,
            max_radius,
        }
    }

    /// Halve the radius (floored).
    pub fn shrink(&mut self) {
        self.radius = (self.radius * 0.5).max(self.min_radius);
    }
}

/// Result of [`trust_region_update`].
///
/// `ratio = actual / predicted` (`-inf` when `predicted <= 0`); the radius
/// doubles (capped) when `ratio >= 0.75` and the step reached the boundary,
/// halves (floored) when `ratio < 0.25` or `actual <= 0`, and stays
/// otherwise. The center moves to `candidate` iff `actual > 0` and a
/// candidate is offered; callers offer only points acceptable under their
/// feasibility rule.
pub fn trust_region_update(
    tr: &TrustRegionState,
    predicted_reduction: f64,
    actual_reduction: f64,
    step_on_boundary: bool,
    candidate: Option<(&[f64], f64)>,
) -> TrustRegionState {
    let mut next = tr.clone();
    let ratio = if predicted_reduction > 0.0 {
        actual_reduction / predicted_reduction
    } else {
        f64::NEG_INFINITY
    };
    if ratio < BAD_RATIO || !(actual_reduction > 0.0) {
        next.radius = (tr.radius * 0.5).max(tr.min_radius);
    } else if ratio >= GOOD_RATIO && step_on_boundary {
        next.radius = (tr.radius * 2.0).min(tr.max_radius);
    }
    match candidate {
        Some((x, merit)) if actual_reduction > 0.0 => {
            next.center = x.to_vec();
            next.center_merit = merit;
            next.success_count += 1;
        }
        _ => next.fail_count += 1,
    }
    next
}

/// Constraint penalty weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MeritConfig {
    /// Penalty `rho_i` of each constraint.
    pub penalties: Vec<f64>,
    /// Factor applied on a violation.
    pub penalty_growth: f64,
    /// Upper limit on each penalty.
    pub penalty_cap: f64,
}

/// Initial penalty weight.
pub const INITIAL_PENALTY: f64 = 100.0;
/// Default penalty growth factor.
pub const PENALTY_GROWTH: f64 = 10.0;
/// Default penalty cap.
pub const PENALTY_CAP: f64 = 1e8;

impl MeritConfig {
    /// Default weights for `n_constraints` constraints.
    pub fn new(n_constraints: usize) -> Self {
        Self {
            penalties: alloc::vec![INITIAL_PENALTY; n_constraints],
            penalty_growth: PENALTY_GROWTH,
            penalty_cap: PENALTY_CAP,
        }
    }

    /// Grow the penalties of the constraints with `g_i > threshold`.
    /// Returns whether any penalty changed.
    pub fn grow(&mut self, g: &[f64], threshold: f64) -> bool {
        let mut changed = false;
        for (rho, gi) in self.penalties.iter_mut().zip(g) {
            if *gi > threshold && *rho < self.penalty_cap {
                *rho = (*rho * self.penalty_growth).min(self.penalty_cap);
                changed = true;
            }
        }
        changed
    }

    /// `f + sum_i rho_i [c_i]_+`.
    pub fn sum_merit(&self, f: f64, c: &[f64]) -> f64 {
        f + self
            .penalties
            .iter()
            .zip(c)
            .map(|(rho, ci)| rho * ci.max(0.0))
            .sum::<f64>()
    }

    /// `f + rho [max_i c_i]_+` with `rho` the largest penalty.
    pub fn max_merit(&self, f: f64, c: &[f64]) -> f64 {
        let worst = c.iter().copied().fold(0.0f64, f64::max);
        let rho = self.penalties.iter().copied().fold(0.0f64, f64::max);
        if worst > 0.0 {
            f + rho * worst
        } else {
            f
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn state(radius: f64) -> TrustRegionState {
        TrustRegionState {
            center: vec![0.0],
            center_merit: 1.0,
            radius,
            success_count: 0,
            fail_count: 0,
            min_radius: 1e-6,
            max_radius: 10.0,
        }
    }

    #[test]
    fn good_boundary_step_expands() {
        let n = trust_region_update(&state(1.0), 1.0, 0.9, true, Some((&[1.0], 0.1)));
        assert_eq!(n.radius, 2.0);
        assert_eq!(n.center, vec![1.0]);
    }

    #[test]
    fn poor_step_shrinks() {
        let n = trust_region_update(&state(1.0), 1.0, 0.1, true, Some((&[1.0], 0.9)));
        assert_eq!(n.radius, 0.5);
        // still an improvement, so the center moves
        assert_eq!(n.center, vec![1.0]);
    }

    #[test]
    fn moderate_interior_step_keeps_radius() {
        let n = trust_region_update(&state(1.0), 1.0, 0.5, false, Some((&[0.5], 0.5)));
        assert_eq!(n.radius, 1.0);
    }

    #[test]
    fn nonpositive_prediction_is_failure() {
        let n = trust_region_update(&state(1.0), 0.0, 0.5, true, Some((&[0.5], 0.5)));
        assert_eq!(n.radius, 0.5);
    }

    #[test]
    fn radius_limits() {
        let n = trust_region_update(&state(8.0), 1.0, 1.0, true, None);
        assert_eq!(n.radius, 10.0);
        let n = trust_region_update(&state(1.5e-6), 1.0, -1.0, false, None);
        assert_eq!(n.radius, 1e-6);
    }

    #[test]
    fn merit_arithmetic() {
        let mut m = MeritConfig::new(2);
        m.penalties = vec![1.0, 1.0];
        assert_eq!(m.max_merit(1.0, &[0.5, -0.2]), 1.5);
        assert_eq!(m.sum_merit(1.0, &[0.5, 0.25]), 1.75);
        assert_eq!(m.sum_merit(1.0, &[-0.5, -0.25]), 1.0);
    }

    #[test]
    fn penalties_grow_and_cap() {
        let mut m = MeritConfig::new(2);
        assert!(m.grow(&[0.002, 0.0005], 0.001));
        assert_eq!(m.penalties, vec![1000.0, 100.0]);
        for _ in 0..10 {
            m.grow(&[1.0, 0.0], 0.001);
        }
        assert_eq!(m.penalties[0], PENALTY_CAP);
        assert!(!m.grow(&[1.0, 0.0], 0.001));
    }

    proptest! {
        #[test]
        fn center_never_moves_uphill(
            merit in -10.0f64..10.0,
            new_merit in -10.0f64..10.0,
            predicted in -1.0f64..2.0,
            boundary: bool,
        ) {
            let mut tr = state(1.0);
            tr.center_merit = merit;
            let actual = merit - new_merit;
            let n = trust_region_update(&tr, predicted, actual, boundary, Some((&[3.0], new_merit)));
            prop_assert!(n.center_merit <= merit);
            prop_assert!(n.radius >= n.min_radius && n.radius <= n.max_radius);
        }
    }
}

//! Constant-velocity propagation, closest-future-distance computation, and
//! direction-based relevance testing.
//!
//! The minimum of the relative distance over the horizon is computed in
//! closed form: `||dp + t*dv||^2` is a convex quadratic in `t`, so the
//! minimizer is the derivative root clamped to `[0, eta]`.

use crate::error::{Error, Result};
use crate::scene::{AgentState, Point2};

/// Weight assigned to a pair whose closest future distance is exactly zero.
pub const DEFAULT_ALPHA_CAP: f64 = 1e3;

/// States produced by rolling a constant-velocity model forward at uniform
/// steps over `[0, eta]`, initial state included.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub states: Vec<AgentState>,
}

/// Propagate a state `t` seconds ahead under constant velocity. Heading and
/// velocity are unchanged.
pub fn propagate_cv(state: &AgentState, t: f64) -> Result<AgentState> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    Ok(AgentState {
        x: state.x + t * state.vx,
        y: state.y + t * state.vy,
        ..*state
    })
}

/// Constant-velocity rollout at uniform steps `dt` over `[0, eta]`.
/// The result has `floor(eta/dt) + 1` states, the first being `state`.
pub fn cv_rollout(state: &AgentState, eta: f64, dt: f64) -> PropagationResult {
    assert!(eta > 0.0 && dt > 0.0);
    let steps = (eta / dt + 1e-9).floor() as usize;
    let states = (0..=steps)
        .map(|k| propagate_cv(state, k as f64 * dt).expect("nonnegative time"))
        .collect();
    PropagationResult { states }
}

/// Closed-form minimum of `||dp + t*dv||` over `t in [0, eta]`.
/// Returns `(distance, t_star)`.
fn min_relative_distance(dp: Point2, dv: Point2, eta: f64) -> (f64, f64) {
    let speed_sq = dv.dot(dv);
    let t_star = if speed_sq == 0.0 {
        0.0
    } else {
        (-dp.dot(dv) / speed_sq).clamp(0.0, eta)
    };
    (dp.add(dv.scale(t_star)).norm(), t_star)
}

/// Closest distance two constant-velocity agents reach within the horizon,
/// and the time at which they reach it.
///
/// `dt` is the scene sampling step; the minimum itself is exact and does
/// not depend on it.
pub fn closest_future_distance(
    si: &AgentState,
    sj: &AgentState,
    eta: f64,
    dt: f64,
) -> (f64, f64) {
    assert!(eta > 0.0, "horizon must be positive");
    assert!(dt > 0.0, "sampling step must be positive");
    let dp = si.position().sub(sj.position());
    let dv = si.velocity().sub(sj.velocity());
    min_relative_distance(dp, dv, eta)
}

/// Interaction weight from a closest future distance: zero at or beyond the
/// threshold `d0`, `d0/d` inside it, and `cap` at exact overlap.
pub fn distance_weight_capped(d: f64, d0: f64, cap: f64) -> f64 {
    debug_assert!(d >= 0.0 && d0 > 0.0);
    if d >= d0 {
        0.0
    } else if d == 0.0 {
        cap
    } else {
        d0 / d
    }
}

/// [`distance_weight_capped`] with the default overlap cap.
pub fn distance_weight(d: f64, d0: f64) -> f64 {
    distance_weight_capped(d, d0, DEFAULT_ALPHA_CAP)
}

/// True iff the two agents come within `d_threshold` of each other at some
/// time in `[0, eta]` under constant velocity. Symmetric in its agents.
pub fn direction_relevant(so: &AgentState, si: &AgentState, d_threshold: f64, eta: f64) -> bool {
    assert!(d_threshold > 0.0 && eta > 0.0);
    let dp = so.position().sub(si.position());
    let dv = so.velocity().sub(si.velocity());
    min_relative_distance(dp, dv, eta).0 < d_threshold
}

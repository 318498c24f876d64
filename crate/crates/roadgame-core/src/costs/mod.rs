//! Concrete driving cost terms and game builders for lane-changing and
//! intersection-crossing scenarios.
//!
//! The cost functions take per-step samples over the prediction horizon; the
//! builders pass the first `T` states of each rolled-out trajectory (the
//! final state is excluded, matching the horizon sum `tau = t .. t+T-1`).

mod intersection;
mod lane_change;

pub use intersection::{
    build_conflict_map, build_intersection_game, Approach, ConflictMap, GameKind,
    IntersectionLayout, Route, RouteVehicle, TurnKind,
};
pub use lane_change::{build_lane_change_game, lane_change_actions, LaneChangeAction, LaneChoice};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Acceleration bounds shared by both scenario families (m/s^2).
pub const ACCEL_MIN: f64 = -3.0;
pub const ACCEL_MAX: f64 = 3.0;

/// Weights and shape parameters of the driving costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    /// Speed-tracking weight.
    pub theta1: f64,
    /// Road-boundary weight (lane changing) or pairwise weight (intersection).
    pub theta2: f64,
    /// Pairwise collision weight (lane changing).
    pub theta3: f64,
    /// Default desired speed (m/s); builders take per-agent values.
    pub desired_speed: f64,
    /// Off-road penalty.
    pub gamma: f64,
    /// Sharpness of the tanh collision factors.
    pub kappa: f64,
    /// Longitudinal collision distance (m).
    pub d_xc: f64,
    /// Lateral collision distance (m).
    pub d_yc: f64,
    /// Regularizer keeping the inverse-distance cost finite.
    pub delta_reg: f64,
    /// Magnitude of the per-agent tie-breaking noise.
    pub tie_noise: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            theta1: 1.0,
            theta2: 1.0,
            theta3: 4.0,
            desired_speed: 27.0,
            gamma: 1000.0,
            kappa: 1000.0,
            d_xc: 7.0,
            d_yc: 4.5,
            delta_reg: 0.01,
            tie_noise: 1e-4,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<()> {
        let weights = [self.theta1, self.theta2, self.theta3, self.gamma, self.tie_noise];
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid_argument("cost weights must be nonnegative"));
        }
        if !(self.d_xc > 0.0 && self.d_yc > 0.0) {
            return Err(Error::invalid_argument("collision distances must be positive"));
        }
        if !(self.delta_reg > 0.0) {
            return Err(Error::invalid_argument("inverse-cost regularizer must be positive"));
        }
        if !(self.kappa > 0.0) {
            return Err(Error::invalid_argument("tanh sharpness must be positive"));
        }
        Ok(())
    }
}

/// Quadratic relative speed-tracking error, summed over the given samples.
pub fn speed_tracking_cost(speeds: &[f64], desired_speed: f64) -> Result<f64> {
    if !(desired_speed > 0.0) {
        return Err(Error::invalid_argument("desired speed must be positive"));
    }
    Ok(speeds
        .iter()
        .map(|v| ((v - desired_speed) / desired_speed).powi(2))
        .sum())
}

/// Off-road penalty: `gamma` per sample strictly outside `[0, road_width]`.
pub fn road_boundary_cost(lateral_offsets: &[f64], road_width: f64, gamma: f64) -> Result<f64> {
    if !(road_width > 0.0) {
        return Err(Error::invalid_argument("road width must be positive"));
    }
    let fired = lateral_offsets
        .iter()
        .filter(|d| **d < 0.0 || **d > road_width)
        .count();
    Ok(gamma * fired as f64)
}

/// Saturating pairwise collision cost over two position samples.
///
/// Positions are road-aligned `[longitudinal, lateral]` pairs. Each step
/// contributes `(tanh(kappa (d_xc^2 - dx^2)) + 1) * (tanh(kappa (d_yc^2 - dy^2)) + 1)`,
/// about 4 when both gaps are inside the collision box and about 0 otherwise.
/// Symmetric in the two trajectories.
pub fn tanh_collision_cost(
    positions_i: &[[f64; 2]],
    positions_j: &[[f64; 2]],
    params: &CostParams,
) -> Result<f64> {
    if positions_i.len() != positions_j.len() {
        return Err(Error::invalid_argument("trajectories must have equal length"));
    }
    let dx2c = params.d_xc * params.d_xc;
    let dy2c = params.d_yc * params.d_yc;
    Ok(positions_i
        .iter()
        .zip(positions_j.iter())
        .map(|(pi, pj)| {
            let dx = pi[0] - pj[0];
            let dy = pi[1] - pj[1];
            let fx = (params.kappa * (dx2c - dx * dx)).tanh() + 1.0;
            let fy = (params.kappa * (dy2c - dy * dy)).tanh() + 1.0;
            fx * fy
        })
        .sum())
}

/// Inverse squared-distance cost, gated by the conflict flag.
///
/// Zero when the pair is not in conflict; otherwise each step contributes
/// `1 / (dx^2 + dy^2 + delta_reg)`. Symmetric in the two trajectories.
pub fn inverse_distance_cost(
    positions_i: &[[f64; 2]],
    positions_j: &[[f64; 2]],
    delta_reg: f64,
    conflict: bool,
) -> Result<f64> {
    if !(delta_reg > 0.0) {
        return Err(Error::invalid_argument("regularizer must be positive"));
    }
    if positions_i.len() != positions_j.len() {
        return Err(Error::invalid_argument("trajectories must have equal length"));
    }
    if !conflict {
        return Ok(0.0);
    }
    Ok(positions_i
        .iter()
        .zip(positions_j.iter())
        .map(|(pi, pj)| {
            let dx = pi[0] - pj[0];
            let dy = pi[1] - pj[1];
            1.0 / (dx * dx + dy * dy + delta_reg)
        })
        .sum())
}

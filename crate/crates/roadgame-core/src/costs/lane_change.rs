//! Finite lane-changing game builder.

use crate::costs::{
    road_boundary_cost, speed_tracking_cost, tanh_collision_cost, CostParams, ACCEL_MAX, ACCEL_MIN,
};
use crate::error::{Error, Result};
use crate::game::{FiniteStrategySpace, StrategySpaces, StructuredGame};
use crate::vehicle::{lane_change_steering, rollout, RoadGeometry, VehicleGeometry, VehicleState};

/// Lane component of a lane-changing action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaneChoice {
    Left,
    Keep,
    Right,
}

impl LaneChoice {
    /// Signed lane-index change; left is toward larger lateral offsets.
    pub fn delta(self) -> f64 {
        match self {
            LaneChoice::Left => 1.0,
            LaneChoice::Keep => 0.0,
            LaneChoice::Right => -1.0,
        }
    }
}

/// One of the 21 lane-changing actions: an acceleration from the seven-step
/// ladder crossed with a lane choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaneChangeAction {
    pub accel: f64,
    pub lane: LaneChoice,
}

impl LaneChangeAction {
    /// Strategy encoding `[accel, lane delta]` used by the game layer.
    pub fn to_strategy(self) -> Vec<f64> {
        vec![self.accel, self.lane.delta()]
    }

    pub fn from_strategy(u: &[f64]) -> Self {
        let lane = if u[1] > 0.5 {
            LaneChoice::Left
        } else if u[1] < -0.5 {
            LaneChoice::Right
        } else {
            LaneChoice::Keep
        };
        Self { accel: u[0], lane }
    }
}

/// The full 21-action menu, acceleration-major with hard brake first.
/// `Keep` precedes the lane changes so that exact cost ties (common on an
/// open road, where speed cost is lane-independent) resolve to staying in
/// lane rather than weaving.
pub fn lane_change_actions() -> Vec<LaneChangeAction> {
    let mut actions = Vec::with_capacity(21);
    let mut accel = ACCEL_MIN;
    while accel <= ACCEL_MAX {
        for lane in [LaneChoice::Keep, LaneChoice::Left, LaneChoice::Right] {
            actions.push(LaneChangeAction { accel, lane });
        }
        accel += 1.0;
    }
    actions
}

/// Target lane index for an action taken from `state`.
fn target_lane(state: &VehicleState, action: LaneChoice, road: &RoadGeometry) -> usize {
    let (_, d) = road.to_road_frame(state.x, state.y);
    let current = road.lane_at(d) as i64;
    let target = current + action.delta() as i64;
    target.clamp(0, road.lane_count as i64 - 1) as usize
}

/// Rolls a lane-changing strategy out from `state` and returns the first
/// `horizon` trajectory samples (the cost grid).
fn roll_strategy(
    state: &VehicleState,
    strategy: &[f64],
    road: &RoadGeometry,
    geom: &VehicleGeometry,
    horizon: usize,
    dt: f64,
) -> Vec<VehicleState> {
    let action = LaneChangeAction::from_strategy(strategy);
    let lane = target_lane(state, action.lane, road);
    let policy = |st: &VehicleState| lane_change_steering(st, lane, road, geom);
    let accels = vec![action.accel; horizon];
    let mut traj = rollout(state, &accels, &policy, geom, dt)
        .expect("lane-change rollout stays within input bounds");
    traj.truncate(horizon);
    traj
}

/// Builds the finite potential game for a lane-changing scene.
///
/// Each agent's cost is `theta1 * speed tracking + theta2 * road boundary`
/// plus `theta3 * tanh collision` against every other vehicle; strategies
/// are constant accelerations paired with a lane choice, rolled out through
/// the bicycle model and the lane-change steering policy.
pub fn build_lane_change_game(
    states: &[VehicleState],
    desired_speeds: &[f64],
    road: &RoadGeometry,
    geom: &VehicleGeometry,
    params: &CostParams,
    horizon: usize,
    dt: f64,
) -> Result<StructuredGame> {
    params.validate()?;
    if states.is_empty() {
        return Err(Error::invalid_argument("need at least one vehicle"));
    }
    if states.len() != desired_speeds.len() {
        return Err(Error::invalid_argument("one desired speed per vehicle required"));
    }
    if horizon == 0 || !(dt > 0.0) {
        return Err(Error::invalid_argument("horizon and step must be positive"));
    }
    let n = states.len();
    let menu: Vec<Vec<f64>> = lane_change_actions().iter().map(|a| a.to_strategy()).collect();
    let space = FiniteStrategySpace::new(vec![menu; n])?;

    let mut builder =
        StructuredGame::builder(StrategySpaces::Finite(space), horizon, dt).global_state(
            states
                .iter()
                .flat_map(|s| [s.x, s.y, s.v, s.heading, s.slip])
                .collect(),
        );

    for agent in 0..n {
        let state = states[agent];
        let road = *road;
        let geom = *geom;
        let v_d = desired_speeds[agent];
        builder = builder.self_cost(agent, params.theta1, move |u| {
            let traj = roll_strategy(&state, u, &road, &geom, horizon, dt);
            let speeds: Vec<f64> = traj.iter().map(|s| s.v).collect();
            speed_tracking_cost(&speeds, v_d).expect("positive desired speed")
        });
        let width = road.width();
        let gamma = params.gamma;
        builder = builder.self_cost(agent, params.theta2, move |u| {
            let traj = roll_strategy(&state, u, &road, &geom, horizon, dt);
            let lateral: Vec<f64> =
                traj.iter().map(|s| road.to_road_frame(s.x, s.y).1).collect();
            road_boundary_cost(&lateral, width, gamma).expect("positive width")
        });
    }

    for i in 0..n {
        for j in i + 1..n {
            let state_i = states[i];
            let state_j = states[j];
            let road = *road;
            let geom = *geom;
            let params = *params;
            builder = builder.symmetric_pair_cost(i, j, params.theta3, move |ui, uj| {
                let pos = |state: &VehicleState, u: &[f64]| -> Vec<[f64; 2]> {
                    roll_strategy(state, u, &road, &geom, horizon, dt)
                        .iter()
                        .map(|s| {
                            let (lon, lat) = road.to_road_frame(s.x, s.y);
                            [lon, lat]
                        })
                        .collect()
                };
                tanh_collision_cost(&pos(&state_i, ui), &pos(&state_j, uj), &params)
                    .expect("equal trajectory lengths")
            });
        }
    }

    builder.build()
}

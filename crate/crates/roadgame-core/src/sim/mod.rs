//! Receding-horizon closed-loop simulation.
//!
//! Each decision step rebuilds the game from the current global state, the
//! ego solves it, applies the first element of its equilibrium strategy, and
//! the surrounding vehicles act per their configured policy. Dynamics are
//! integrated in 0.1 s sub-steps; collisions are detected at the sub-step
//! grid and episodes continue after contact so speed statistics stay
//! comparable across policies.

mod metrics;
mod trace_io;

pub use metrics::{compute_metrics, detect_collision, ttc, CollisionEvent, CollisionPose, Metrics};
pub use trace_io::{export_trace, import_trace};

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::costs::{
    build_conflict_map, build_intersection_game, build_lane_change_game, lane_change_actions,
    Approach, ConflictMap, CostParams, GameKind, IntersectionLayout, LaneChangeAction, Route,
    RouteVehicle, TurnKind, ACCEL_MAX, ACCEL_MIN,
};
use crate::error::{Error, Result};
use crate::game::{StrategyProfile, StructuredGame};
use crate::seeding::{derive_seed, derive_seed2};
use crate::solve::{
    best_response_dynamics, potential_optimization, BRConfig, NEResult, OptimizerConfig,
    DEFAULT_EPSILON,
};
use crate::vehicle::{
    lane_change_steering, road_heading, step, ControlInput, RoadGeometry, VehicleGeometry,
    VehicleState, SUBSTEP_PERIOD,
};

const SOLVER_STREAM: u64 = 1;
const POLICY_STREAM: u64 = 2;
const TIE_STREAM: u64 = 3;

/// Which algorithm the ego uses to solve each step's game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EgoSolver {
    BestResponseDynamics,
    PotentialOptimization,
}

/// Behavior of the non-ego vehicles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SurroundingPolicy {
    /// Apply their components of the step's equilibrium.
    NashFollower,
    /// Zero acceleration, heading held.
    ConstantSpeed,
    /// Uniform draw from the agent's action space each step.
    RandomAcceleration,
    /// Brake or accelerate at fixed magnitude based on time-to-collision
    /// when a conflicting vehicle is within the safe distance.
    TtcHeuristic { safe_distance: f64, accel_magnitude: f64 },
}

impl SurroundingPolicy {
    pub fn ttc_default() -> Self {
        SurroundingPolicy::TtcHeuristic { safe_distance: 15.0, accel_magnitude: 2.0 }
    }
}

/// Scene-specific part of a scenario.
#[derive(Clone, Serialize, Deserialize)]
pub enum ScenarioKind {
    LaneChange {
        road: RoadGeometry,
        initial: Vec<VehicleState>,
    },
    Intersection {
        layout: IntersectionLayout,
        routes: Vec<(Approach, TurnKind)>,
        /// Initial (arc length, speed) per vehicle.
        initial: Vec<(f64, f64)>,
        game_kind: GameKind,
    },
}

/// Full specification of one closed-loop episode.
#[derive(Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub desired_speeds: Vec<f64>,
    /// Index of the ego vehicle.
    pub ego: usize,
    pub solver: EgoSolver,
    pub policy: SurroundingPolicy,
    pub params: CostParams,
    pub horizon: usize,
    pub dt: f64,
    /// Episode duration in seconds; must be a multiple of `dt`.
    pub duration: f64,
    pub seed: u64,
    pub optimizer: OptimizerConfig,
    /// Epsilon for continuous-game best-response dynamics.
    pub epsilon: f64,
}

/// Applied control for one vehicle over one decision interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppliedAction {
    pub accel: f64,
    /// Lane being tracked; `None` holds the heading (or follows the route).
    pub lane_target: Option<usize>,
}

/// One decision step of a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    /// States the step's game was built from.
    pub states: Vec<VehicleState>,
    /// The ego's full equilibrium strategy vector.
    pub ego_strategy: Vec<f64>,
    pub actions: Vec<AppliedAction>,
    /// Solver wall time for this decision (s); excluded from determinism
    /// comparisons.
    pub solve_time: f64,
    pub potential: Option<f64>,
    /// First contacts detected during this step's sub-steps.
    pub events: Vec<CollisionEvent>,
}

/// Full episode history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub ego: usize,
    pub dt: f64,
    pub steps: Vec<StepRecord>,
    pub final_states: Vec<VehicleState>,
}

impl SimTrace {
    pub fn events(&self) -> impl Iterator<Item = &CollisionEvent> {
        self.steps.iter().flat_map(|s| s.events.iter())
    }

    pub fn ego_collided(&self) -> bool {
        self.events().any(|e| e.involves(self.ego))
    }

    /// Equality of everything except solver wall times.
    pub fn same_semantics(&self, other: &SimTrace) -> bool {
        if self.ego != other.ego
            || self.dt != other.dt
            || self.final_states != other.final_states
            || self.steps.len() != other.steps.len()
        {
            return false;
        }
        self.steps.iter().zip(other.steps.iter()).all(|(a, b)| {
            a.step == b.step
                && a.states == b.states
                && a.ego_strategy == b.ego_strategy
                && a.actions == b.actions
                && a.potential == b.potential
                && a.events == b.events
        })
    }
}

impl ScenarioConfig {
    pub fn n_vehicles(&self) -> usize {
        match &self.kind {
            ScenarioKind::LaneChange { initial, .. } => initial.len(),
            ScenarioKind::Intersection { initial, .. } => initial.len(),
        }
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_vehicles();
        if n == 0 {
            return Err(Error::invalid_argument("scenario has no vehicles"));
        }
        if self.desired_speeds.len() != n {
            return Err(Error::invalid_argument("one desired speed per vehicle required"));
        }
        if self.ego >= n {
            return Err(Error::invalid_argument("ego index out of range"));
        }
        if !(self.dt > 0.0) || self.horizon == 0 {
            return Err(Error::invalid_argument("horizon and step must be positive"));
        }
        let steps = self.duration / self.dt;
        if !(self.duration > 0.0) || (steps - steps.round()).abs() > 1e-9 {
            return Err(Error::invalid_argument("duration must be a positive multiple of dt"));
        }
        self.params.validate()?;
        self.optimizer.validate()?;
        if let ScenarioKind::Intersection { routes, initial, .. } = &self.kind {
            if routes.len() != n || initial.len() != n {
                return Err(Error::invalid_argument("route and state counts must match"));
            }
        }
        // initial states must be collision-free
        let poses = self.initial_poses();
        let contacts = detect_collision(&poses, self.params.d_xc, self.params.d_yc);
        if let Some((i, j)) = contacts.first() {
            return Err(Error::invalid_argument(format!(
                "vehicles {i} and {j} start inside the collision box"
            )));
        }
        Ok(())
    }

    fn initial_poses(&self) -> Vec<CollisionPose> {
        match &self.kind {
            ScenarioKind::LaneChange { road, initial } => initial
                .iter()
                .map(|s| {
                    let (lon, _) = road.to_road_frame(s.x, s.y);
                    CollisionPose {
                        position: [s.x, s.y],
                        frame_heading: road_heading(road, lon),
                        speed: s.v,
                    }
                })
                .collect(),
            ScenarioKind::Intersection { layout, routes, initial, .. } => {
                let routes = build_routes(layout, routes);
                initial
                    .iter()
                    .zip(routes.iter())
                    .map(|(&(s, v), route)| CollisionPose {
                        position: route.position_at(s),
                        frame_heading: route.heading_at(s),
                        speed: v,
                    })
                    .collect()
            }
        }
    }
}

fn build_routes(layout: &IntersectionLayout, specs: &[(Approach, TurnKind)]) -> Vec<Arc<Route>> {
    specs
        .iter()
        .map(|&(from, turn)| Arc::new(layout.route(from, turn)))
        .collect()
}

/// Runs one closed-loop episode. Deterministic given the config (solver wall
/// times aside); solver failures abort the episode with an error so callers
/// can count them.
pub fn run_episode(config: &ScenarioConfig) -> Result<SimTrace> {
    config.validate()?;
    match &config.kind {
        ScenarioKind::LaneChange { road, initial } => {
            run_lane_change(config, road, initial.clone())
        }
        ScenarioKind::Intersection { layout, routes, initial, game_kind } => {
            run_intersection(config, layout, routes, initial, *game_kind)
        }
    }
}

fn solve_step(
    config: &ScenarioConfig,
    game: &StructuredGame,
    neutral: &StrategyProfile,
    step_idx: usize,
) -> Result<(NEResult, f64)> {
    let seed = derive_seed2(config.seed, SOLVER_STREAM, step_idx as u64);
    let started = Instant::now();
    let result = match config.solver {
        EgoSolver::BestResponseDynamics => {
            let epsilon = if game.spaces().is_finite() { 0.0 } else { config.epsilon };
            let brd = BRConfig {
                max_sweeps: 50,
                epsilon,
                inner: OptimizerConfig { restarts: 3, seed, ..config.optimizer.clone() },
            };
            best_response_dynamics(game, neutral, &brd)?
        }
        EgoSolver::PotentialOptimization => {
            let opt = OptimizerConfig { seed, ..config.optimizer.clone() };
            potential_optimization(game, &opt)?
        }
    };
    let elapsed = started.elapsed().as_secs_f64();
    Ok((result, elapsed))
}

/// Tracks pairs currently in contact so only first contacts produce events.
struct ContactTracker {
    in_contact: Vec<Vec<bool>>,
}

impl ContactTracker {
    fn new(n: usize) -> Self {
        Self { in_contact: vec![vec![false; n]; n] }
    }

    fn update(
        &mut self,
        poses: &[CollisionPose],
        d_xc: f64,
        d_yc: f64,
        step_idx: usize,
        ego: usize,
        events: &mut Vec<CollisionEvent>,
    ) {
        let pairs = detect_collision(poses, d_xc, d_yc);
        let mut now = vec![vec![false; poses.len()]; poses.len()];
        for (i, j) in pairs {
            now[i][j] = true;
            now[j][i] = true;
            if !self.in_contact[i][j] {
                events.push(CollisionEvent {
                    step: step_idx,
                    pair: (i, j),
                    relative_speed: (poses[i].speed - poses[j].speed).abs(),
                    ego_speed: poses[ego].speed,
                    positions: [poses[i].position, poses[j].position],
                });
            }
        }
        self.in_contact = now;
    }
}

fn run_lane_change(
    config: &ScenarioConfig,
    road: &RoadGeometry,
    mut states: Vec<VehicleState>,
) -> Result<SimTrace> {
    let n = states.len();
    let geom = VehicleGeometry::default();
    let n_sub = (config.dt / SUBSTEP_PERIOD).round().max(1.0) as usize;
    let dt_sub = config.dt / n_sub as f64;
    let mut policy_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, POLICY_STREAM));
    let actions_menu = lane_change_actions();
    let mut tracker = ContactTracker::new(n);
    let mut records = Vec::with_capacity(config.steps());

    for step_idx in 0..config.steps() {
        let game = build_lane_change_game(
            &states,
            &config.desired_speeds,
            road,
            &geom,
            &config.params,
            config.horizon,
            config.dt,
        )?;
        let neutral = StrategyProfile::new(vec![vec![0.0, 0.0]; n], step_idx as f64 * config.dt);
        let (ne, solve_time) = solve_step(config, &game, &neutral, step_idx)?;

        let mut applied = Vec::with_capacity(n);
        for agent in 0..n {
            let from_ne = || {
                let action = LaneChangeAction::from_strategy(ne.profile.strategy(agent));
                let (_, d) = road.to_road_frame(states[agent].x, states[agent].y);
                let current = road.lane_at(d) as i64;
                let target = (current + action.lane.delta() as i64)
                    .clamp(0, road.lane_count as i64 - 1) as usize;
                AppliedAction { accel: action.accel, lane_target: Some(target) }
            };
            if agent == config.ego {
                applied.push(from_ne());
                continue;
            }
            match config.policy {
                SurroundingPolicy::NashFollower => applied.push(from_ne()),
                SurroundingPolicy::ConstantSpeed => {
                    applied.push(AppliedAction { accel: 0.0, lane_target: None })
                }
                SurroundingPolicy::RandomAcceleration => {
                    let pick = policy_rng.gen_range(0..actions_menu.len());
                    let action = actions_menu[pick];
                    let (_, d) = road.to_road_frame(states[agent].x, states[agent].y);
                    let current = road.lane_at(d) as i64;
                    let target = (current + action.lane.delta() as i64)
                        .clamp(0, road.lane_count as i64 - 1) as usize;
                    applied.push(AppliedAction { accel: action.accel, lane_target: Some(target) });
                }
                SurroundingPolicy::TtcHeuristic { safe_distance, accel_magnitude } => {
                    let me = &states[agent];
                    let (my_lon, my_lat) = road.to_road_frame(me.x, me.y);
                    let my_lane = road.lane_at(my_lat);
                    // nearest leader in my lane within the safe distance
                    let mut gap_ahead = f64::INFINITY;
                    for (other, st) in states.iter().enumerate() {
                        if other == agent {
                            continue;
                        }
                        let (lon, lat) = road.to_road_frame(st.x, st.y);
                        if road.lane_at(lat) == my_lane && lon > my_lon {
                            gap_ahead = gap_ahead.min(lon - my_lon);
                        }
                    }
                    let accel = if gap_ahead < safe_distance {
                        -accel_magnitude
                    } else {
                        ((config.desired_speeds[agent] - me.v) / config.dt)
                            .clamp(ACCEL_MIN, ACCEL_MAX)
                    };
                    applied.push(AppliedAction { accel, lane_target: None });
                }
            }
        }

        let record_states = states.clone();
        let mut events = Vec::new();
        for _ in 0..n_sub {
            for agent in 0..n {
                let steer = match applied[agent].lane_target {
                    Some(lane) => lane_change_steering(&states[agent], lane, road, &geom),
                    None => 0.0,
                };
                let input = ControlInput { accel: applied[agent].accel, steer };
                states[agent] = step(&states[agent], &input, &geom, dt_sub)?;
            }
            let poses: Vec<CollisionPose> = states
                .iter()
                .map(|s| {
                    let (lon, _) = road.to_road_frame(s.x, s.y);
                    CollisionPose {
                        position: [s.x, s.y],
                        frame_heading: road_heading(road, lon),
                        speed: s.v,
                    }
                })
                .collect();
            tracker.update(
                &poses,
                config.params.d_xc,
                config.params.d_yc,
                step_idx,
                config.ego,
                &mut events,
            );
        }

        records.push(StepRecord {
            step: step_idx,
            states: record_states,
            ego_strategy: ne.profile.strategy(config.ego).to_vec(),
            actions: applied,
            solve_time,
            potential: ne.potential_value,
            events,
        });
    }

    Ok(SimTrace { ego: config.ego, dt: config.dt, steps: records, final_states: states })
}

fn run_intersection(
    config: &ScenarioConfig,
    layout: &IntersectionLayout,
    route_specs: &[(Approach, TurnKind)],
    initial: &[(f64, f64)],
    game_kind: GameKind,
) -> Result<SimTrace> {
    let n = initial.len();
    let routes = build_routes(layout, route_specs);
    let conflicts = build_conflict_map(&routes, layout.half_box)?;
    let tie_seed = derive_seed(config.seed, TIE_STREAM);
    let n_sub = (config.dt / SUBSTEP_PERIOD).round().max(1.0) as usize;
    let dt_sub = config.dt / n_sub as f64;
    let mut policy_rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, POLICY_STREAM));
    let mut tracker = ContactTracker::new(n);
    let mut records = Vec::with_capacity(config.steps());

    let mut vehicles: Vec<RouteVehicle> = initial
        .iter()
        .zip(routes.iter())
        .map(|(&(s, v), route)| RouteVehicle { route: Arc::clone(route), s, v })
        .collect();

    let state_of = |veh: &RouteVehicle| -> VehicleState {
        let p = veh.position();
        VehicleState { x: p[0], y: p[1], v: veh.v, heading: veh.heading(), slip: 0.0 }
    };

    for step_idx in 0..config.steps() {
        let game = build_intersection_game(
            &vehicles,
            &config.desired_speeds,
            &conflicts,
            &config.params,
            game_kind,
            config.horizon,
            config.dt,
            tie_seed,
        )?;
        let neutral = StrategyProfile::new(vec![vec![0.0]; n], step_idx as f64 * config.dt);
        let (ne, solve_time) = solve_step(config, &game, &neutral, step_idx)?;

        let mut applied = Vec::with_capacity(n);
        for agent in 0..n {
            if agent == config.ego {
                applied.push(AppliedAction {
                    accel: ne.profile.strategy(agent)[0],
                    lane_target: None,
                });
                continue;
            }
            let accel = match config.policy {
                SurroundingPolicy::NashFollower => ne.profile.strategy(agent)[0],
                SurroundingPolicy::ConstantSpeed => 0.0,
                SurroundingPolicy::RandomAcceleration => match game_kind {
                    GameKind::Continuous => policy_rng.gen_range(ACCEL_MIN..=ACCEL_MAX),
                    GameKind::Finite => policy_rng.gen_range(-3i64..=3) as f64,
                },
                SurroundingPolicy::TtcHeuristic { safe_distance, accel_magnitude } => {
                    ttc_heuristic_accel(
                        agent,
                        &vehicles,
                        &conflicts,
                        config.desired_speeds[agent],
                        config.dt,
                        safe_distance,
                        accel_magnitude,
                    )
                }
            };
            applied.push(AppliedAction { accel, lane_target: None });
        }

        let record_states: Vec<VehicleState> = vehicles.iter().map(&state_of).collect();
        let mut events = Vec::new();
        for _ in 0..n_sub {
            for (veh, action) in vehicles.iter_mut().zip(applied.iter()) {
                veh.s += veh.v * dt_sub;
                veh.v = (veh.v + action.accel * dt_sub).max(0.0);
            }
            let poses: Vec<CollisionPose> = vehicles
                .iter()
                .map(|veh| CollisionPose {
                    position: veh.position(),
                    frame_heading: veh.heading(),
                    speed: veh.v,
                })
                .collect();
            tracker.update(
                &poses,
                config.params.d_xc,
                config.params.d_yc,
                step_idx,
                config.ego,
                &mut events,
            );
        }

        records.push(StepRecord {
            step: step_idx,
            states: record_states,
            ego_strategy: ne.profile.strategy(config.ego).to_vec(),
            actions: applied,
            solve_time,
            potential: ne.potential_value,
            events,
        });
    }

    Ok(SimTrace {
        ego: config.ego,
        dt: config.dt,
        steps: records,
        final_states: vehicles.iter().map(&state_of).collect(),
    })
}

/// Simplified driver heuristic: when a conflicting vehicle is within the
/// safe distance and neither has passed the crossing, brake if own
/// time-to-collision is greater than or equal to the other's, accelerate
/// otherwise, both at fixed magnitude. Free of threats, track the desired
/// speed.
fn ttc_heuristic_accel(
    agent: usize,
    vehicles: &[RouteVehicle],
    conflicts: &ConflictMap,
    desired_speed: f64,
    dt: f64,
    safe_distance: f64,
    accel_magnitude: f64,
) -> f64 {
    let me = &vehicles[agent];
    let my_pos = me.position();
    let mut threat: Option<(f64, usize)> = None;
    for (other, veh) in vehicles.iter().enumerate() {
        if other == agent || !conflicts.in_conflict(agent, other) {
            continue;
        }
        let Some((s_mine, s_theirs)) = conflicts.crossing(agent, other) else {
            continue;
        };
        if me.s > s_mine || veh.s > s_theirs {
            continue; // someone already passed the crossing
        }
        let p = veh.position();
        let gap = ((my_pos[0] - p[0]).powi(2) + (my_pos[1] - p[1]).powi(2)).sqrt();
        if gap < safe_distance && threat.as_ref().map_or(true, |(g, _)| gap < *g) {
            threat = Some((gap, other));
        }
    }
    match threat {
        Some((_, other)) => {
            let (s_mine, s_theirs) = conflicts.crossing(agent, other).unwrap();
            let mine = ttc(s_mine - me.s, me.v);
            let theirs = ttc(s_theirs - vehicles[other].s, vehicles[other].v);
            if mine >= theirs {
                -accel_magnitude
            } else {
                accel_magnitude
            }
        }
        None => ((desired_speed - me.v) / dt).clamp(ACCEL_MIN, ACCEL_MAX),
    }
}

/// Canonical five-vehicle intersection: the ego crosses straight from the
/// south; the others arrive from the west, north, and east plus a
/// left-turner from the north. `approach_gaps` are distances from each
/// vehicle to its region entry.
pub fn intersection_config(
    game_kind: GameKind,
    solver: EgoSolver,
    policy: SurroundingPolicy,
    approach_gaps: &[f64; 5],
    initial_speeds: &[f64; 5],
    seed: u64,
) -> ScenarioConfig {
    let layout = IntersectionLayout::default();
    let route_specs = [
        (Approach::South, TurnKind::Straight),
        (Approach::West, TurnKind::Straight),
        (Approach::North, TurnKind::Straight),
        (Approach::East, TurnKind::Straight),
        (Approach::North, TurnKind::Left),
    ];
    let initial: Vec<(f64, f64)> = route_specs
        .iter()
        .zip(approach_gaps.iter().zip(initial_speeds.iter()))
        .map(|(&(from, turn), (&gap, &v))| {
            let route = layout.route(from, turn);
            (layout.region_entry(&route) - gap, v)
        })
        .collect();
    ScenarioConfig {
        kind: ScenarioKind::Intersection {
            layout,
            routes: route_specs.to_vec(),
            initial,
            game_kind,
        },
        desired_speeds: vec![5.0; 5],
        ego: 0,
        solver,
        policy,
        params: CostParams {
            theta2: 100.0,
            desired_speed: 5.0,
            ..CostParams::default()
        },
        horizon: 8,
        dt: 0.5,
        duration: 12.0,
        seed,
        optimizer: OptimizerConfig {
            restarts: 10,
            population: 16,
            generations: 30,
            ..OptimizerConfig::default()
        },
        epsilon: DEFAULT_EPSILON,
    }
}

/// Scenario with a slower leader ahead of the ego and a faster vehicle
/// approaching in the target lane: the ego changes lanes once and keeps its
/// desired speed.
pub fn lane_change_scenario1(seed: u64) -> ScenarioConfig {
    let road = RoadGeometry::straight(3, 5.0);
    let lane = |k: usize| road.lane_center(k);
    let initial = vec![
        VehicleState::new(0.0, lane(0), 27.0, 0.0, 0.0),
        VehicleState::new(40.0, lane(0), 23.0, 0.0, 0.0),
        VehicleState::new(-45.0, lane(1), 29.0, 0.0, 0.0),
        VehicleState::new(20.0, lane(2), 26.0, 0.0, 0.0),
        VehicleState::new(-30.0, lane(0), 24.0, 0.0, 0.0),
    ];
    lane_change_config(road, initial, vec![27.0, 23.0, 29.0, 26.0, 24.0], 15.0, seed)
}

/// Scenario with all three lanes blocked by slower traffic: the ego moves to
/// the middle lane, overtakes the original leader, and returns.
pub fn lane_change_scenario3(seed: u64) -> ScenarioConfig {
    let road = RoadGeometry::straight(3, 5.0);
    let lane = |k: usize| road.lane_center(k);
    let initial = vec![
        VehicleState::new(0.0, lane(0), 27.0, 0.0, 0.0),
        VehicleState::new(35.0, lane(0), 21.0, 0.0, 0.0),
        VehicleState::new(42.0, lane(1), 24.0, 0.0, 0.0),
        VehicleState::new(-45.0, lane(1), 22.0, 0.0, 0.0),
        VehicleState::new(38.0, lane(2), 23.0, 0.0, 0.0),
    ];
    lane_change_config(road, initial, vec![27.0, 21.0, 24.0, 22.0, 23.0], 25.0, seed)
}

fn lane_change_config(
    road: RoadGeometry,
    initial: Vec<VehicleState>,
    desired_speeds: Vec<f64>,
    duration: f64,
    seed: u64,
) -> ScenarioConfig {
    ScenarioConfig {
        kind: ScenarioKind::LaneChange { road, initial },
        desired_speeds,
        ego: 0,
        solver: EgoSolver::PotentialOptimization,
        policy: SurroundingPolicy::ConstantSpeed,
        params: CostParams::default(),
        horizon: 8,
        dt: 0.5,
        duration,
        seed,
        optimizer: OptimizerConfig::default(),
        epsilon: DEFAULT_EPSILON,
    }
}

//! Discrete-time kinematic bicycle model, road geometry, and steering logic.
//!
//! The state update is a forward-Euler step of the kinematic bicycle with an
//! integrated slip angle; lane changes are driven by a constant-steer approach
//! phase followed by a 10 Hz lane-centering law on the relative heading.

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Front-steering limit, 20 degrees in radians.
pub const MAX_STEER: f64 = 20.0 * std::f64::consts::PI / 180.0;

/// Constant steering magnitude used while approaching the target lane, 0.9 degrees.
pub const LANE_CHANGE_STEER: f64 = 0.9 * std::f64::consts::PI / 180.0;

/// Sub-step period for dynamics integration and the lane-centering law (10 Hz).
pub const SUBSTEP_PERIOD: f64 = 0.1;

/// Fraction of the clamp-limited slip rate budgeted by the braking curve that
/// caps the centering law's slip command at large heading errors. The slip
/// angle integrates through the steering clamp, so commands must stay
/// trackable by the 10 Hz loop or the heading overshoots.
const CURVE_MARGIN: f64 = 0.2;

/// Half-command floor below which the plain `-(heading error)/2` rule applies
/// unclamped (heading errors up to 0.03 rad).
const LINEAR_CMD_CAP: f64 = 0.015;

/// Scales the predicted turn-out distance that triggers the handover from the
/// constant-steer approach to the centering law.
const HANDOVER_FACTOR: f64 = 1.4;

/// Course angle at which the approach phase stops adding steer and holds the
/// heading instead, bounding the lateral speed of a lane change.
const COURSE_CAP: f64 = 0.16;

/// Lateral band around the target center where the centering law regulates
/// the remaining offset.
const CENTER_DEADBAND: f64 = 1.5;

/// Gain and cap of the lateral-offset slip contribution inside the deadband.
const LATERAL_GAIN: f64 = 0.5;
const LATERAL_CMD_CAP: f64 = 0.03;

/// Course errors above this are never treated as approach-phase states.
const ADVERSE_COURSE: f64 = 0.05;

/// Bicycle-model state: positions in meters, speed in m/s, angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    /// Longitudinal position of the center of mass.
    pub x: f64,
    /// Lateral position of the center of mass.
    pub y: f64,
    /// Speed of the center of mass (clamped at zero).
    pub v: f64,
    /// Inertial heading.
    pub heading: f64,
    /// Angle of the velocity vector relative to the longitudinal axis.
    pub slip: f64,
}

impl VehicleState {
    pub fn new(x: f64, y: f64, v: f64, heading: f64, slip: f64) -> Self {
        Self { x, y, v, heading, slip }
    }
}

/// Acceleration (m/s^2) and front steering angle (rad).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlInput {
    pub accel: f64,
    pub steer: f64,
}

/// Distances from the center of mass to the front and rear ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleGeometry {
    pub lf: f64,
    pub lr: f64,
}

impl Default for VehicleGeometry {
    fn default() -> Self {
        Self { lf: 1.5, lr: 1.5 }
    }
}

/// Multi-lane road with an optional constant-curvature centerline.
///
/// Road-frame coordinates are `(s, d)`: arc length along the base edge curve
/// and leftward lateral offset. For a straight road these coincide with
/// world `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoadGeometry {
    pub lane_count: usize,
    pub lane_width: f64,
    /// Signed curvature of the base curve (1/m); 0 for a straight road.
    pub curvature: f64,
    /// Maximum modeled arc length; headings clamp to the end value beyond it.
    pub extent: f64,
}

impl RoadGeometry {
    pub fn straight(lane_count: usize, lane_width: f64) -> Self {
        Self { lane_count, lane_width, curvature: 0.0, extent: f64::INFINITY }
    }

    pub fn arc(lane_count: usize, lane_width: f64, curvature: f64, extent: f64) -> Self {
        Self { lane_count, lane_width, curvature, extent }
    }

    /// Total road width.
    pub fn width(&self) -> f64 {
        self.lane_count as f64 * self.lane_width
    }

    /// Lateral offset of a lane center (lanes indexed from 0 at the right edge).
    pub fn lane_center(&self, lane: usize) -> f64 {
        (lane as f64 + 0.5) * self.lane_width
    }

    /// Lane index containing the lateral offset `d`, clamped to the road.
    pub fn lane_at(&self, d: f64) -> usize {
        let idx = (d / self.lane_width).floor();
        idx.clamp(0.0, (self.lane_count - 1) as f64) as usize
    }

    /// World position to road frame `(s, d)`.
    pub fn to_road_frame(&self, x: f64, y: f64) -> (f64, f64) {
        if self.curvature == 0.0 {
            return (x, y);
        }
        let k = self.curvature;
        let radius = 1.0 / k.abs();
        let ang = (k * x).atan2(1.0 - k * y);
        let s = ang / k;
        let r = (x * x + (y - 1.0 / k) * (y - 1.0 / k)).sqrt();
        let d = k.signum() * (radius - r);
        (s, d)
    }
}

/// Centerline heading at arc length `s`, clamped to the modeled extent.
pub fn road_heading(road: &RoadGeometry, s: f64) -> f64 {
    road.curvature * s.clamp(-road.extent, road.extent)
}

/// One forward-Euler step of the kinematic bicycle model.
///
/// Position and heading updates use the pre-update speed and slip; the slip
/// update integrates the steering-induced rate over `dt`.
pub fn step(
    state: &VehicleState,
    input: &ControlInput,
    geom: &VehicleGeometry,
    dt: f64,
) -> Result<VehicleState, Error> {
    if input.steer.abs() > MAX_STEER + 1e-12 {
        return Err(Error::invalid_argument(format!(
            "steering angle {:.4} rad exceeds the {:.4} rad limit",
            input.steer, MAX_STEER
        )));
    }
    let course = state.heading + state.slip;
    let slip_rate = (geom.lr / (geom.lr + geom.lf) * input.steer.tan()).atan();
    Ok(VehicleState {
        x: state.x + state.v * course.cos() * dt,
        y: state.y + state.v * course.sin() * dt,
        v: (state.v + input.accel * dt).max(0.0),
        heading: state.heading + state.v / geom.lr * state.slip.sin() * dt,
        slip: state.slip + slip_rate * dt,
    })
}

/// Largest achievable slip rate under the steering clamp (rad/s).
fn max_slip_rate(geom: &VehicleGeometry) -> f64 {
    let q = geom.lr / (geom.lr + geom.lf);
    (q * MAX_STEER.tan()).atan()
}

/// Steering angle whose slip rate best matches `rate` (rad/s), clamped to the
/// steering limit.
fn steer_for_slip_rate(rate: f64, geom: &VehicleGeometry) -> f64 {
    let q = geom.lr / (geom.lr + geom.lf);
    if rate.abs() >= max_slip_rate(geom) {
        log::debug!("slip-rate command {rate:.4} rad/s clamped to steering limit");
        MAX_STEER.copysign(rate)
    } else {
        (rate.tan() / q).atan()
    }
}

/// Centering slip command for a heading error `err` at speed `v`:
/// `-err/2`, capped by the braking curve of the rate-limited slip channel so
/// the 10 Hz loop can unwind large errors without overshooting.
fn centering_slip_cmd(err: f64, v: f64, geom: &VehicleGeometry) -> f64 {
    let rate_budget = CURVE_MARGIN * max_slip_rate(geom);
    let brake = (2.0 * rate_budget * geom.lr * err.abs() / v.max(1.0)).sqrt();
    let mag = (err.abs() / 2.0).min(brake.max(LINEAR_CMD_CAP));
    -mag.copysign(err)
}

/// Steering command for changing to (or holding) `target_lane`.
///
/// Away from the target-lane center a constant 0.9-degree steer toward the
/// target builds course up to [`COURSE_CAP`], then the heading is held. Once
/// the predicted turn-out distance reaches the remaining lateral error, the
/// lane-centering law takes over: it commands the slip angle
/// `-(heading - road heading)/2` (braking-curve capped, plus the slip that
/// holds the road curvature, plus a small lateral-offset correction inside
/// [`CENTER_DEADBAND`]) at the 10 Hz sub-step rate, inverted through the
/// slip update and clamped to the steering limit.
pub fn lane_change_steering(
    state: &VehicleState,
    target_lane: usize,
    road: &RoadGeometry,
    geom: &VehicleGeometry,
) -> f64 {
    let (s, d) = road.to_road_frame(state.x, state.y);
    let heading_err = state.heading - road_heading(road, s);
    let curve_slip = (road.curvature * geom.lr).clamp(-1.0, 1.0).asin();
    let lateral_err = road.lane_center(target_lane) - d;
    let course = heading_err + state.slip - curve_slip;

    let rate_budget = CURVE_MARGIN * max_slip_rate(geom);
    let v = state.v.max(1.0);
    let unwind = (2.0 * rate_budget * v / geom.lr).sqrt();
    let turnout = HANDOVER_FACTOR * v * (2.0 / (3.0 * unwind)) * course.abs().powf(1.5);
    let moving_toward = course * lateral_err > 0.0;
    let handover = if moving_toward { turnout.max(CENTER_DEADBAND) } else { CENTER_DEADBAND };

    if lateral_err.abs() >= handover && (moving_toward || course.abs() < ADVERSE_COURSE) {
        if course.abs() < COURSE_CAP || course * lateral_err < 0.0 {
            LANE_CHANGE_STEER.copysign(lateral_err)
        } else {
            // hold the built-up course: bleed the slip to the curve value
            steer_for_slip_rate((curve_slip - state.slip) / SUBSTEP_PERIOD, geom)
        }
    } else {
        let lateral = if lateral_err.abs() < CENTER_DEADBAND {
            (LATERAL_GAIN * lateral_err / v).clamp(-LATERAL_CMD_CAP, LATERAL_CMD_CAP)
        } else {
            0.0
        };
        let slip_cmd = curve_slip + centering_slip_cmd(heading_err, state.v, geom) + lateral;
        steer_for_slip_rate((slip_cmd - state.slip) / SUBSTEP_PERIOD, geom)
    }
}

/// Roll the dynamics forward over `actions.len()` decision steps of length `dt`.
///
/// Each decision step is integrated in 0.1 s sub-steps with the steering
/// policy re-evaluated at every sub-step; the returned trajectory holds the
/// `T + 1` states on the decision grid, starting with `state`.
pub fn rollout(
    state: &VehicleState,
    actions: &[f64],
    steering: &dyn Fn(&VehicleState) -> f64,
    geom: &VehicleGeometry,
    dt: f64,
) -> Result<Vec<VehicleState>, Error> {
    if dt <= 0.0 {
        return Err(Error::invalid_argument("time step must be positive"));
    }
    let n_sub = (dt / SUBSTEP_PERIOD).round().max(1.0) as usize;
    let dt_sub = dt / n_sub as f64;
    let mut trajectory = Vec::with_capacity(actions.len() + 1);
    let mut current = *state;
    trajectory.push(current);
    for &accel in actions {
        for _ in 0..n_sub {
            let input = ControlInput { accel, steer: steering(&current) };
            current = step(&current, &input, geom, dt_sub)?;
        }
        trajectory.push(current);
    }
    Ok(trajectory)
}

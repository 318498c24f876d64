//! Collision detection, time-to-collision, and episode metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::SimTrace;

/// Planar pose used for collision checks: position, the heading of the
/// vehicle's road or route frame at that position, and current speed.
#[derive(Debug, Clone, Copy)]
pub struct CollisionPose {
    pub position: [f64; 2],
    pub frame_heading: f64,
    pub speed: f64,
}

/// One recorded contact between a vehicle pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub step: usize,
    pub pair: (usize, usize),
    /// |v_i - v_j| of scalar speeds at first contact.
    pub relative_speed: f64,
    /// Ego speed at the moment of the event (whether or not ego is involved).
    pub ego_speed: f64,
    /// World positions of the two vehicles at first contact.
    pub positions: [[f64; 2]; 2],
}

impl CollisionEvent {
    pub fn involves(&self, vehicle: usize) -> bool {
        self.pair.0 == vehicle || self.pair.1 == vehicle
    }
}

/// Pairs currently inside the collision box.
///
/// The gap between two vehicles is resolved into longitudinal/lateral
/// components in each vehicle's own frame; a pair collides iff it is inside
/// the `(d_xc, d_yc)` box in both frames (strict inequalities). For vehicles
/// sharing a road frame this is exactly the single road-aligned box.
pub fn detect_collision(poses: &[CollisionPose], d_xc: f64, d_yc: f64) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..poses.len() {
        for j in i + 1..poses.len() {
            let dx = poses[i].position[0] - poses[j].position[0];
            let dy = poses[i].position[1] - poses[j].position[1];
            let inside = |heading: f64| {
                let lon = dx * heading.cos() + dy * heading.sin();
                let lat = -dx * heading.sin() + dy * heading.cos();
                lon.abs() < d_xc && lat.abs() < d_yc
            };
            if inside(poses[i].frame_heading) && inside(poses[j].frame_heading) {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Time to reach a conflict point `distance` meters ahead at `speed`.
/// Infinite when stationary or already past the point.
pub fn ttc(distance: f64, speed: f64) -> f64 {
    if speed <= 0.0 || distance < 0.0 {
        f64::INFINITY
    } else {
        distance / speed
    }
}

/// Aggregate statistics over a batch of episode traces.
///
/// Collision statistics cover ego-involved events only; fields are absent
/// when no such event occurred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub episodes: usize,
    /// Fraction of episodes with at least one ego collision.
    pub collision_rate: f64,
    /// Mean ego speed over every step of every episode (m/s).
    pub avg_ego_speed: f64,
    pub avg_relative_collision_speed: Option<f64>,
    pub max_relative_collision_speed: Option<f64>,
    pub avg_ego_speed_at_collision: Option<f64>,
    pub max_ego_speed_at_collision: Option<f64>,
    /// Per-decision solver wall time (s).
    pub avg_decision_time: f64,
    pub max_decision_time: f64,
}

pub fn compute_metrics(traces: &[SimTrace]) -> Result<Metrics> {
    if traces.is_empty() {
        return Err(Error::invalid_argument("need at least one trace"));
    }
    let episodes = traces.len();
    let mut ego_collision_episodes = 0usize;
    let mut speed_sum = 0.0;
    let mut speed_count = 0usize;
    let mut rel_speeds = Vec::new();
    let mut ego_speeds_at = Vec::new();
    let mut time_sum = 0.0;
    let mut time_count = 0usize;
    let mut time_max = 0.0f64;

    for trace in traces {
        let ego = trace.ego;
        let mut collided = false;
        for record in &trace.steps {
            speed_sum += record.states[ego].v;
            speed_count += 1;
            time_sum += record.solve_time;
            time_count += 1;
            time_max = time_max.max(record.solve_time);
            for event in &record.events {
                if event.involves(ego) {
                    collided = true;
                    rel_speeds.push(event.relative_speed);
                    ego_speeds_at.push(event.ego_speed);
                }
            }
        }
        if collided {
            ego_collision_episodes += 1;
        }
    }

    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let max = |xs: &[f64]| xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let stats = |xs: &[f64]| {
        if xs.is_empty() {
            (None, None)
        } else {
            (Some(mean(xs)), Some(max(xs)))
        }
    };
    let (avg_rel, max_rel) = stats(&rel_speeds);
    let (avg_ego_at, max_ego_at) = stats(&ego_speeds_at);

    Ok(Metrics {
        episodes,
        collision_rate: ego_collision_episodes as f64 / episodes as f64,
        avg_ego_speed: speed_sum / speed_count.max(1) as f64,
        avg_relative_collision_speed: avg_rel,
        max_relative_collision_speed: max_rel,
        avg_ego_speed_at_collision: avg_ego_at,
        max_ego_speed_at_collision: max_ego_at,
        avg_decision_time: time_sum / time_count.max(1) as f64,
        max_decision_time: time_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pose(x: f64, y: f64, heading: f64) -> CollisionPose {
        CollisionPose { position: [x, y], frame_heading: heading, speed: 0.0 }
    }

    #[test]
    fn boundary_is_exclusive() {
        // exactly at the longitudinal distance: no collision
        let poses = [pose(0.0, 0.0, 0.0), pose(7.0, 0.0, 0.0)];
        assert!(detect_collision(&poses, 7.0, 4.5).is_empty());
    }

    #[test]
    fn inside_box_collides() {
        let poses = [pose(0.0, 0.0, 0.0), pose(3.0, 1.0, 0.0)];
        assert_eq!(detect_collision(&poses, 7.0, 4.5), vec![(0, 1)]);
    }

    #[test]
    fn two_lanes_apart_never_collides() {
        let poses = [pose(0.0, 2.5, 0.0), pose(0.0, 12.5, 0.0)];
        assert!(detect_collision(&poses, 7.0, 4.5).is_empty());
    }

    #[test]
    fn adjacent_lane_oncoming_traffic_is_clear_in_route_frames() {
        // both travel along y in lanes offset by 5 m; the lateral gap of 5 m
        // exceeds d_yc in both route frames
        let a = pose(2.5, 0.0, std::f64::consts::FRAC_PI_2);
        let b = pose(-2.5, 1.0, -std::f64::consts::FRAC_PI_2);
        assert!(detect_collision(&[a, b], 7.0, 4.5).is_empty());
    }

    #[test]
    fn perpendicular_pair_uses_both_frames() {
        // northbound and eastbound vehicles 4 m apart on each axis: inside
        // both lateral constraints
        let a = pose(0.0, 0.0, std::f64::consts::FRAC_PI_2);
        let b = pose(4.0, 0.0, 0.0);
        assert_eq!(detect_collision(&[a, b], 7.0, 4.5), vec![(0, 1)]);
        // 5 m apart laterally in the northbound frame: clear
        let c = pose(5.0, 0.0, 0.0);
        assert!(detect_collision(&[a, c], 7.0, 4.5).is_empty());
    }

    #[test]
    fn ttc_examples() {
        assert_eq!(ttc(20.0, 0.0), f64::INFINITY);
        assert_abs_diff_eq!(ttc(20.0, 5.0), 4.0, epsilon = 1e-12);
        assert_eq!(ttc(-1.0, 5.0), f64::INFINITY);
    }
}

//! Line-delimited trace export.
//!
//! One file per episode. The first line is a header, followed by one record
//! per decision step and a trailer with the final states. Field order within
//! each line follows the struct definitions and is stable across runs;
//! everything except the per-step `solve_time` is deterministic for a fixed
//! config and seed.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{SimTrace, StepRecord};
use crate::vehicle::VehicleState;

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    ego: usize,
    dt: f64,
    steps: usize,
}

#[derive(Serialize, Deserialize)]
struct Trailer {
    final_states: Vec<VehicleState>,
}

const FORMAT: &str = "roadgame-trace-v1";

/// Writes a trace as JSON lines: header, step records, trailer.
pub fn export_trace<W: Write>(trace: &SimTrace, mut out: W) -> Result<()> {
    let header = Header {
        format: FORMAT.to_string(),
        ego: trace.ego,
        dt: trace.dt,
        steps: trace.steps.len(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for record in &trace.steps {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    let trailer = Trailer { final_states: trace.final_states.clone() };
    serde_json::to_writer(&mut out, &trailer)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Reads a trace written by [`export_trace`].
pub fn import_trace<R: BufRead>(input: R) -> Result<SimTrace> {
    let mut lines = input.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::invalid_argument("empty trace file"))??;
    let header: Header = serde_json::from_str(&header_line)?;
    if header.format != FORMAT {
        return Err(Error::invalid_argument(format!(
            "unsupported trace format {:?}",
            header.format
        )));
    }
    let mut steps: Vec<StepRecord> = Vec::with_capacity(header.steps);
    for _ in 0..header.steps {
        let line = lines
            .next()
            .ok_or_else(|| Error::invalid_argument("trace truncated before trailer"))??;
        steps.push(serde_json::from_str(&line)?);
    }
    let trailer_line = lines
        .next()
        .ok_or_else(|| Error::invalid_argument("trace missing trailer"))??;
    let trailer: Trailer = serde_json::from_str(&trailer_line)?;
    Ok(SimTrace { ego: header.ego, dt: header.dt, steps, final_states: trailer.final_states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{AppliedAction, CollisionEvent};

    fn sample_trace() -> SimTrace {
        SimTrace {
            ego: 0,
            dt: 0.5,
            steps: vec![StepRecord {
                step: 0,
                states: vec![
                    VehicleState::new(0.0, 2.5, 27.0, 0.0, 0.0),
                    VehicleState::new(30.0, 2.5, 22.0, 0.0, 0.0),
                ],
                ego_strategy: vec![2.0, 0.0],
                actions: vec![
                    AppliedAction { accel: 2.0, lane_target: Some(0) },
                    AppliedAction { accel: 0.0, lane_target: None },
                ],
                solve_time: 0.003125,
                potential: Some(1.25),
                events: vec![CollisionEvent {
                    step: 0,
                    pair: (0, 1),
                    relative_speed: 5.0,
                    ego_speed: 27.0,
                    positions: [[0.0, 2.5], [6.5, 2.5]],
                }],
            }],
            final_states: vec![
                VehicleState::new(13.5, 2.5, 28.0, 0.0, 0.0),
                VehicleState::new(41.0, 2.5, 22.0, 0.0, 0.0),
            ],
        }
    }

    #[test]
    fn round_trip_preserves_everything() {
        let trace = sample_trace();
        let mut buffer = Vec::new();
        export_trace(&trace, &mut buffer).unwrap();
        let parsed = import_trace(buffer.as_slice()).unwrap();
        assert_eq!(parsed, trace);
    }

    #[test]
    fn export_layout_is_stable() {
        let trace = sample_trace();
        let mut buffer = Vec::new();
        export_trace(&trace, &mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("{\"format\":\"roadgame-trace-v1\""));
        assert!(lines[1].starts_with("{\"step\":0,\"states\":"));
        assert!(lines[2].starts_with("{\"final_states\":"));
    }

    #[test]
    fn truncated_file_is_rejected() {
        let trace = sample_trace();
        let mut buffer = Vec::new();
        export_trace(&trace, &mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let truncated: String = text.lines().take(2).collect::<Vec<_>>().join("\n");
        assert!(import_trace(truncated.as_bytes()).is_err());
    }
}

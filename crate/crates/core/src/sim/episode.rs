use std::fmt;
use std::io::Write;

use crate::bt::{BehaviourTree, Blackboard};
use crate::vision::{CameraModel, DetectorParams, Sensor};

use super::{step, Pose, RoomConfig, SimParams, VehicleState, Wall};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Success,
    Crash,
    Timeout,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Success => "success",
            Outcome::Crash => "crash",
            Outcome::Timeout => "timeout",
        })
    }
}

impl std::str::FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "success" => Ok(Outcome::Success),
            "crash" => Ok(Outcome::Crash),
            "timeout" => Ok(Outcome::Timeout),
            other => Err(format!("unknown outcome `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination {
    Continue,
    /// Crossed the window wall inside the opening at `point`, `fraction` of
    /// the way along the step.
    Success { point: (f64, f64), fraction: f64 },
    /// Hit `wall` outside the opening.
    Crash { point: (f64, f64), fraction: f64, wall: Wall },
    Timeout,
}

/// Classifies the step `prev → state` for a point vehicle.
pub fn check_termination(prev: &VehicleState, state: &VehicleState, room: &RoomConfig, params: &SimParams) -> Termination {
    let b = room.bounds();
    let (x0, y0, x1, y1) = (prev.x, prev.y, state.x, state.y);
    let mut first: Option<(f64, Wall)> = None;
    let mut consider = |t: f64, wall: Wall| {
        if first.map_or(true, |(ft, _)| t < ft) {
            first = Some((t, wall));
        }
    };
    if x1 >= b.x1 && x0 < b.x1 {
        consider((b.x1 - x0) / (x1 - x0), Wall::East);
    }
    if x1 <= b.x0 && x0 > b.x0 {
        consider((b.x0 - x0) / (x1 - x0), Wall::West);
    }
    if y1 >= b.y1 && y0 < b.y1 {
        consider((b.y1 - y0) / (y1 - y0), Wall::North);
    }
    if y1 <= b.y0 && y0 > b.y0 {
        consider((b.y0 - y0) / (y1 - y0), Wall::South);
    }
    if let Some((t, wall)) = first {
        let point = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        // snap onto the wall so the lateral offset is measured in-plane
        let point = match wall {
            Wall::East => (b.x1, point.1),
            Wall::West => (b.x0, point.1),
            Wall::North => (point.0, b.y1),
            Wall::South => (point.0, b.y0),
        };
        return if room.in_window_span(wall, point.0, point.1) {
            Termination::Success { point, fraction: t }
        } else {
            Termination::Crash {
                point,
                fraction: t,
                wall,
            }
        };
    }
    if state.time >= params.timeout {
        Termination::Timeout
    } else {
        Termination::Continue
    }
}

/// One decision tick of a flight, recorded before the rudder command is applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub rudder_actual: f64,
    pub blackboard: Blackboard,
    /// Index of the Action node that set the rudder this tick; `None` if
    /// the previous command was held.
    pub mode: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeResult {
    pub init: Pose,
    pub outcome: Outcome,
    pub final_position: (f64, f64),
    /// Planar vector from the window centre to the final position.
    pub e: (f64, f64),
    pub flight_time: f64,
    /// Angle between the velocity and the window-wall normal at the crossing,
    /// degrees. Successes only.
    pub approach_angle: Option<f64>,
    /// Absolute lateral offset from the window centre at the crossing,
    /// metres. Successes only.
    pub centre_offset: Option<f64>,
    pub path: Vec<PathSample>,
}

impl EpisodeResult {
    pub fn error_norm(&self) -> f64 {
        self.e.0.hypot(self.e.1)
    }
}

/// Static configuration of an episode.
#[derive(Clone, Debug, Default)]
pub struct World {
    pub room: RoomConfig,
    pub sim: SimParams,
    pub camera: CameraModel,
    pub detector: DetectorParams,
}

/// Flies `tree` from `init` until it passes the window, crashes or times out.
///
/// Each decision tick senses, ticks the tree, then integrates the resulting
/// rudder command over the physics substeps, checking termination after
/// each one. The vision pipeline runs before the first physics step.
pub fn run_episode(tree: &BehaviourTree, init: Pose, world: &World) -> EpisodeResult {
    let World {
        room,
        sim,
        camera,
        detector,
    } = world;
    let substeps = sim.physics_substeps;
    let steps_per_second = sim.decision_rate * substeps as f64;
    let dt = 1.0 / steps_per_second;
    let mut state = VehicleState::at_rest(init);
    let mut bb = Blackboard::default();
    let mut path = Vec::new();
    let mut n: u64 = 0;
    let sensor = Sensor::new(camera, detector);
    loop {
        let features = sensor.sense(&state.pose(), sim.camera_height, room);
        features.write_to(&mut bb);
        let (_, next_bb, mode) = tree.tick_with_mode(bb);
        bb = next_bb;
        path.push(PathSample {
            t: state.time,
            x: state.x,
            y: state.y,
            heading: state.heading,
            rudder_actual: state.rudder_actual,
            blackboard: bb,
            mode,
        });
        for _ in 0..substeps {
            let prev = state;
            state = step(&prev, bb.rudder, dt, sim);
            n += 1;
            state.time = n as f64 / steps_per_second;
            let termination = check_termination(&prev, &state, room, sim);
            let (outcome, point, fraction) = match termination {
                Termination::Continue => continue,
                Termination::Success { point, fraction } => (Outcome::Success, point, fraction),
                Termination::Crash { point, fraction, .. } => (Outcome::Crash, point, fraction),
                Termination::Timeout => (Outcome::Timeout, (state.x, state.y), 1.0),
            };
            let flight_time = prev.time + fraction * (state.time - prev.time);
            path.push(PathSample {
                t: flight_time,
                x: point.0,
                y: point.1,
                heading: state.heading,
                rudder_actual: state.rudder_actual,
                blackboard: bb,
                mode,
            });
            return finish(room, init, outcome, point, flight_time, &prev, &state, path);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    room: &RoomConfig,
    init: Pose,
    outcome: Outcome,
    point: (f64, f64),
    flight_time: f64,
    prev: &VehicleState,
    state: &VehicleState,
    path: Vec<PathSample>,
) -> EpisodeResult {
    let (cx, cy) = room.window_centre();
    let e = (point.0 - cx, point.1 - cy);
    let (approach_angle, centre_offset) = if outcome == Outcome::Success {
        let (vx, vy) = (state.x - prev.x, state.y - prev.y);
        let (nx, ny) = room.window_normal();
        let cos = ((vx * nx + vy * ny) / vx.hypot(vy)).clamp(-1.0, 1.0);
        (
            Some(cos.acos().to_degrees()),
            Some(room.lateral_offset(point.0, point.1).abs()),
        )
    } else {
        (None, None)
    };
    EpisodeResult {
        init,
        outcome,
        final_position: point,
        e,
        flight_time,
        approach_angle,
        centre_offset,
        path,
    }
}

/// Writes the decision-rate path trace as CSV.
pub fn write_trace_csv<W: Write>(out: W, result: &EpisodeResult) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "t", "x", "y", "heading", "rudder_actual", "bb_x", "bb_sigma", "bb_Sigma", "bb_Delta", "r_cmd", "mode",
    ])?;
    for s in &result.path {
        let mode = s.mode.map_or_else(|| "hold".to_string(), |m| m.to_string());
        w.write_record([
            s.t.to_string(),
            s.x.to_string(),
            s.y.to_string(),
            s.heading.to_string(),
            s.rudder_actual.to_string(),
            s.blackboard.x.to_string(),
            s.blackboard.sigma.to_string(),
            s.blackboard.sum_disparity.to_string(),
            s.blackboard.delta.to_string(),
            s.blackboard.rudder.to_string(),
            mode,
        ])?;
    }
    w.flush()?;
    Ok(())
}

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::RoomConfig;

/// Fixed constants of the simplified vehicle model and episode loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimParams {
    /// Forward speed, m/s.
    pub speed: f64,
    /// Turn rate at full rudder, rad/s.
    pub max_turn_rate: f64,
    /// Time constant of the first-order rudder actuator lag, s.
    pub actuator_tau: f64,
    /// Tree ticks per second.
    pub decision_rate: f64,
    /// Physics integration steps per tick.
    pub physics_substeps: usize,
    /// Episode time limit, s.
    pub timeout: f64,
    /// Camera (flight) altitude, m.
    pub camera_height: f64,
    /// Minimum spawn distance from every wall, m.
    pub spawn_margin: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            speed: 0.5,
            max_turn_rate: 0.4,
            actuator_tau: 1.0,
            decision_rate: 10.0,
            physics_substeps: 10,
            timeout: 100.0,
            camera_height: 1.5,
            spawn_margin: 0.5,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("invalid simulation parameter: {0}")]
pub struct SimParamsError(pub &'static str);

impl SimParams {
    pub fn validate(&self, room: &RoomConfig) -> Result<(), SimParamsError> {
        let positive = [
            (self.speed, "speed must be positive"),
            (self.max_turn_rate, "max_turn_rate must be positive"),
            (self.actuator_tau, "actuator_tau must be positive"),
            (self.decision_rate, "decision_rate must be positive"),
            (self.timeout, "timeout must be positive"),
        ];
        for (v, msg) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SimParamsError(msg));
            }
        }
        if self.physics_substeps == 0 {
            return Err(SimParamsError("physics_substeps must be at least 1"));
        }
        if !(self.camera_height > 0.0 && self.camera_height < room.height) {
            return Err(SimParamsError("camera_height must be inside the room"));
        }
        if !(self.spawn_margin >= 0.0 && 2.0 * self.spawn_margin < room.width.min(room.length)) {
            return Err(SimParamsError("spawn_margin leaves no spawn area"));
        }
        Ok(())
    }

    /// Radius of a steady full-rudder turn.
    pub fn min_turn_radius(&self) -> f64 {
        self.speed / self.max_turn_rate
    }

    /// Integration step, s.
    pub fn substep_dt(&self) -> f64 {
        1.0 / (self.decision_rate * self.physics_substeps as f64)
    }
}

/// Planar position (m) and heading (rad, counter-clockwise from +x).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    /// Actual rudder deflection (actuator filter output).
    pub rudder_actual: f64,
    pub rudder_command: f64,
    pub time: f64,
}

impl VehicleState {
    pub fn at_rest(pose: Pose) -> Self {
        VehicleState {
            x: pose.x,
            y: pose.y,
            heading: wrap_angle(pose.heading),
            rudder_actual: 0.0,
            rudder_command: 0.0,
            time: 0.0,
        }
    }

    pub fn pose(&self) -> Pose {
        Pose {
            x: self.x,
            y: self.y,
            heading: self.heading,
        }
    }
}

/// Wraps an angle to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Advances the vehicle by `dt` seconds under a constant rudder command.
///
/// Positive rudder turns counter-clockwise. The actuator is an exact
/// discretisation of a first-order lag; the position moves `speed * dt`
/// along the mid-step heading.
pub fn step(state: &VehicleState, rudder_command: f64, dt: f64, params: &SimParams) -> VehicleState {
    let cmd = rudder_command.clamp(-1.0, 1.0);
    let alpha = 1.0 - (-dt / params.actuator_tau).exp();
    let rudder_actual = (state.rudder_actual + (cmd - state.rudder_actual) * alpha).clamp(-1.0, 1.0);
    let dh = rudder_actual * params.max_turn_rate * dt;
    let mid = state.heading + 0.5 * dh;
    let ds = params.speed * dt;
    VehicleState {
        x: state.x + ds * mid.cos(),
        y: state.y + ds * mid.sin(),
        heading: wrap_angle(state.heading + dh),
        rudder_actual,
        rudder_command: cmd,
        time: state.time + dt,
    }
}

/// Random start pose: uniform over the room shrunk by the spawn margin, with
/// a uniform heading.
pub fn spawn<R: Rng + ?Sized>(rng: &mut R, room: &RoomConfig, params: &SimParams) -> Pose {
    let m = params.spawn_margin;
    let x = rng.gen_range(m..=room.width - m);
    let y = rng.gen_range(m..=room.length - m);
    let heading = wrap_angle(rng.gen_range(-PI..PI));
    Pose { x, y, heading }
}

//! Planar flight simulation of the flapping-wing vehicle in the windowed room.
//!
//! The vehicle flies at constant speed and altitude; the only control is the
//! rudder, which passes through a first-order actuator lag before setting the
//! turn rate. A tree is ticked at the decision rate and physics is integrated
//! in substeps between ticks.

mod dynamics;
mod episode;
mod room;

pub use dynamics::{spawn, step, wrap_angle, Pose, SimParams, SimParamsError, VehicleState};
pub use episode::{
    check_termination, run_episode, write_trace_csv, EpisodeResult, Outcome, PathSample, Termination, World,
};
pub use room::{Bounds, RoomConfig, RoomError, Wall, WindowConfig};

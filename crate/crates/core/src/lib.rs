//! Evolving behaviour-tree controllers for a simulated fly-through-window task.
//!
//! - [`bt`]: the tree genome, tick semantics, text format and pruning.
//! - [`vision`]: ray-cast depth, disparity, summed-area tables and window
//!   detection producing the blackboard inputs.
//! - [`sim`]: planar vehicle dynamics and the episode loop.
//! - [`evaluation`]: fitness and the validation protocol.
//! - [`evolution`]: genetic operators, the generation loop and checkpoints.
//! - [`config`]: the TOML run configuration.
//! - [`plot`]: SVG rendering of flight traces and validation starts.
//! - [`cli`]: the subcommands behind the `bt-flight` binary.
//! - [`rng`]: seeded, per-purpose random streams.

pub mod bt;
pub mod cli;
pub mod config;
pub mod evaluation;
pub mod evolution;
pub mod plot;
pub mod rng;
pub mod sim;
pub mod vision;

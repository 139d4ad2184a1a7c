//! Run configuration file (TOML).
//!
//! ```toml
//! output_dir = "runs/seed1"
//!
//! [ea]
//! max_generations = 150
//! population_size = 100
//! # ... every EA key is required
//!
//! [room]      # optional, defaults to the 8x8x3 m room
//! [sim]       # optional
//! [vision]    # optional: detector scales, stride, epsilon
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evolution::EAParams;
use crate::sim::{RoomConfig, SimParams, World};
use crate::vision::{CameraModel, DetectorParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub ea: EAParams,
    #[serde(default)]
    pub room: RoomConfig,
    #[serde(default)]
    pub sim: SimParams,
    #[serde(default)]
    pub vision: DetectorParams,
    /// Where `evolve` writes its outputs. Relative paths are resolved against
    /// the directory holding the config file.
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("output")
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            ea: EAParams::default(),
            room: RoomConfig::default(),
            sim: SimParams::default(),
            vision: DetectorParams::default(),
            output_dir: default_output_dir(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("config {path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.message().to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })?;
        cfg.validate().map_err(|message| ConfigError::Invalid {
            path: path.to_path_buf(),
            message,
        })?;
        if cfg.output_dir.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        self.ea.validate().map_err(|e| e.to_string())?;
        self.room.validate().map_err(|e| e.to_string())?;
        self.sim.validate(&self.room).map_err(|e| e.to_string())?;
        self.vision.validate().map_err(str::to_string)?;
        Ok(())
    }

    pub fn world(&self) -> World {
        World {
            room: self.room.clone(),
            sim: self.sim.clone(),
            camera: CameraModel::default(),
            detector: self.vision.clone(),
        }
    }
}

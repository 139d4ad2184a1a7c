use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One of the four vertical walls of the (front) room.
///
/// The room spans `x ∈ [0, width]`, `y ∈ [0, length]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wall {
    /// `y = length`
    North,
    /// `y = 0`
    South,
    /// `x = width`
    East,
    /// `x = 0`
    West,
}

impl Wall {
    pub const ALL: [Wall; 4] = [Wall::North, Wall::South, Wall::East, Wall::West];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowConfig {
    pub wall: Wall,
    /// Offset of the window centre from the middle of its wall, metres.
    pub centre_offset: f64,
    pub width: f64,
    pub height: f64,
    /// Height of the window centre above the floor, metres.
    pub elevation: f64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            wall: Wall::North,
            centre_offset: 0.0,
            width: 0.8,
            height: 0.8,
            elevation: 1.5,
        }
    }
}

/// The windowed room. An identical room sits mirrored behind the window
/// wall, reached only through the window opening.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RoomConfig {
    pub width: f64,
    pub length: f64,
    pub height: f64,
    pub window: WindowConfig,
}

impl Default for RoomConfig {
    fn default() -> Self {
        RoomConfig {
            width: 8.0,
            length: 8.0,
            height: 3.0,
            window: WindowConfig::default(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RoomError {
    #[error("room dimensions must be positive, got {0} x {1} x {2}")]
    Dimensions(f64, f64, f64),
    #[error("window does not fit within its wall")]
    WindowOutsideWall,
}

/// Axis-aligned planar box `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Bounds {
    /// Distance along unit direction `(dx, dy)` from an interior point to the
    /// boundary, and the wall that is hit.
    pub fn exit(&self, px: f64, py: f64, dx: f64, dy: f64) -> (f64, Wall) {
        let (tx, wx) = if dx > 0.0 {
            ((self.x1 - px) / dx, Wall::East)
        } else if dx < 0.0 {
            ((self.x0 - px) / dx, Wall::West)
        } else {
            (f64::INFINITY, Wall::East)
        };
        let (ty, wy) = if dy > 0.0 {
            ((self.y1 - py) / dy, Wall::North)
        } else if dy < 0.0 {
            ((self.y0 - py) / dy, Wall::South)
        } else {
            (f64::INFINITY, Wall::North)
        };
        if tx <= ty {
            (tx, wx)
        } else {
            (ty, wy)
        }
    }
}

impl RoomConfig {
    pub fn validate(&self) -> Result<(), RoomError> {
        if !(self.width > 0.0 && self.length > 0.0 && self.height > 0.0) {
            return Err(RoomError::Dimensions(self.width, self.length, self.height));
        }
        let w = &self.window;
        let wall_len = self.wall_length(w.wall);
        let along = wall_len / 2.0 + w.centre_offset;
        let fits = w.width > 0.0
            && w.height > 0.0
            && along - w.width / 2.0 >= 0.0
            && along + w.width / 2.0 <= wall_len
            && w.elevation - w.height / 2.0 >= 0.0
            && w.elevation + w.height / 2.0 <= self.height;
        if !fits {
            return Err(RoomError::WindowOutsideWall);
        }
        Ok(())
    }

    pub fn bounds(&self) -> Bounds {
        Bounds {
            x0: 0.0,
            x1: self.width,
            y0: 0.0,
            y1: self.length,
        }
    }

    /// The mirrored room behind the window wall.
    pub fn back_bounds(&self) -> Bounds {
        let b = self.bounds();
        match self.window.wall {
            Wall::North => Bounds {
                y0: self.length,
                y1: 2.0 * self.length,
                ..b
            },
            Wall::South => Bounds {
                y0: -self.length,
                y1: 0.0,
                ..b
            },
            Wall::East => Bounds {
                x0: self.width,
                x1: 2.0 * self.width,
                ..b
            },
            Wall::West => Bounds {
                x0: -self.width,
                x1: 0.0,
                ..b
            },
        }
    }

    fn wall_length(&self, wall: Wall) -> f64 {
        match wall {
            Wall::North | Wall::South => self.width,
            Wall::East | Wall::West => self.length,
        }
    }

    /// Planar position of the window centre.
    pub fn window_centre(&self) -> (f64, f64) {
        let w = &self.window;
        match w.wall {
            Wall::North => (self.width / 2.0 + w.centre_offset, self.length),
            Wall::South => (self.width / 2.0 + w.centre_offset, 0.0),
            Wall::East => (self.width, self.length / 2.0 + w.centre_offset),
            Wall::West => (0.0, self.length / 2.0 + w.centre_offset),
        }
    }

    /// Unit normal of the window wall pointing out of the front room.
    pub fn window_normal(&self) -> (f64, f64) {
        match self.window.wall {
            Wall::North => (0.0, 1.0),
            Wall::South => (0.0, -1.0),
            Wall::East => (1.0, 0.0),
            Wall::West => (-1.0, 0.0),
        }
    }

    /// Signed position along the window wall relative to the window centre.
    pub fn lateral_offset(&self, x: f64, y: f64) -> f64 {
        let (cx, cy) = self.window_centre();
        match self.window.wall {
            Wall::North | Wall::South => x - cx,
            Wall::East | Wall::West => y - cy,
        }
    }

    /// Whether a point on `wall` lies within the window's horizontal span.
    pub fn in_window_span(&self, wall: Wall, x: f64, y: f64) -> bool {
        wall == self.window.wall && self.lateral_offset(x, y).abs() < self.window.width / 2.0
    }

    pub fn in_window_height(&self, z: f64) -> bool {
        (z - self.window.elevation).abs() < self.window.height / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_room_is_valid() {
        let room = RoomConfig::default();
        room.validate().unwrap();
        assert_eq!(room.window_centre(), (4.0, 8.0));
        assert!(room.in_window_span(Wall::North, 4.39, 8.0));
        assert!(!room.in_window_span(Wall::North, 4.4, 8.0));
        assert!(!room.in_window_span(Wall::East, 8.0, 4.0));
    }

    #[test]
    fn window_must_fit() {
        let mut room = RoomConfig::default();
        room.window.centre_offset = 3.8;
        assert_eq!(room.validate(), Err(RoomError::WindowOutsideWall));
        let mut room = RoomConfig::default();
        room.window.elevation = 2.8;
        assert_eq!(room.validate(), Err(RoomError::WindowOutsideWall));
    }

    #[test]
    fn exit_distances() {
        let b = RoomConfig::default().bounds();
        assert_eq!(b.exit(4.0, 4.0, 0.0, 1.0), (4.0, Wall::North));
        assert_eq!(b.exit(1.0, 4.0, -1.0, 0.0), (1.0, Wall::West));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (t, wall) = b.exit(7.0, 4.0, s, s);
        assert!((t - 2.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!(wall, Wall::East);
    }

    #[test]
    fn back_room_shares_window_wall() {
        let mut room = RoomConfig::default();
        for wall in Wall::ALL {
            room.window.wall = wall;
            let back = room.back_bounds();
            let (cx, cy) = room.window_centre();
            let on_edge = cx == back.x0 || cx == back.x1 || cy == back.y0 || cy == back.y1;
            assert!(on_edge, "{wall:?}");
        }
    }
}

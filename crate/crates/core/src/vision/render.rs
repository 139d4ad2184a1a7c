//! Ray-cast depth rendering of the two-room geometry.
//!
//! The camera is level, so every pixel in a column shares one horizontal ray
//! direction. Each column is intersected with the walls once; each pixel then
//! only decides between floor/ceiling and wall (or, through the window
//! opening, the back room).

use super::{CameraModel, DepthImage, DisparityMap, Image};
use crate::sim::{Pose, RoomConfig};

/// Precomputed horizontal geometry of one image column.
struct Column {
    /// `sqrt(1 + l²)` for the column's lateral image-plane offset `l`.
    norm: f64,
    /// Horizontal distance to the front-room wall.
    wall: f64,
    /// Horizontal distance to the back-room wall, if the ray meets the
    /// window wall inside the window's horizontal span.
    through: Option<f64>,
}

impl Column {
    fn new(pose: &Pose, room: &RoomConfig, lateral: f64) -> Column {
        let (s, c) = pose.heading.sin_cos();
        // forward + lateral * left, with left = (-sin, cos)
        let hx = c - lateral * s;
        let hy = s + lateral * c;
        let norm = (1.0 + lateral * lateral).sqrt();
        let (dx, dy) = (hx / norm, hy / norm);
        let (wall_t, wall) = room.bounds().exit(pose.x, pose.y, dx, dy);
        let hit = (pose.x + wall_t * dx, pose.y + wall_t * dy);
        let through = room
            .in_window_span(wall, hit.0, hit.1)
            .then(|| room.back_bounds().exit(pose.x, pose.y, dx, dy).0.max(wall_t));
        Column {
            norm,
            wall: wall_t,
            through,
        }
    }

    /// Euclidean depth along the ray with vertical image-plane offset `up`.
    fn depth(&self, up: f64, z0: f64, room: &RoomConfig) -> f64 {
        // Height gained per metre of horizontal travel.
        let slope = up / self.norm;
        let flat = if slope > 0.0 {
            (room.height - z0) / slope
        } else if slope < 0.0 {
            -z0 / slope
        } else {
            f64::INFINITY
        };
        let horizontal = if flat <= self.wall {
            flat
        } else {
            match self.through {
                Some(back) if room.in_window_height(z0 + slope * self.wall) => flat.min(back),
                _ => self.wall,
            }
        };
        horizontal * (1.0 + slope * slope).sqrt()
    }
}

/// Depth along the ray through continuous image coordinates `(u, v)`, where
/// `(0, 0)` is the top-left image corner and pixel centres sit at `+0.5`.
pub fn cast_ray(camera: &CameraModel, pose: &Pose, camera_height: f64, room: &RoomConfig, u: f64, v: f64) -> f64 {
    let (fx, fy) = (camera.focal_x(), camera.focal_y());
    let lateral = (camera.width as f64 / 2.0 - u) / fx;
    let up = (camera.height as f64 / 2.0 - v) / fy;
    let col = Column::new(pose, room, lateral);
    col.depth(up, camera_height, room)
}

/// Renders the depth image seen from `pose` at altitude `camera_height`.
pub fn render_depth(camera: &CameraModel, pose: &Pose, camera_height: f64, room: &RoomConfig) -> DepthImage {
    let (w, h) = (camera.width, camera.height);
    let (fx, fy) = (camera.focal_x(), camera.focal_y());
    let ups: Vec<f64> = (0..h).map(|j| (h as f64 / 2.0 - (j as f64 + 0.5)) / fy).collect();
    let mut pixels = vec![0.0; w * h];
    for i in 0..w {
        let lateral = (w as f64 / 2.0 - (i as f64 + 0.5)) / fx;
        let col = Column::new(pose, room, lateral);
        for (j, &up) in ups.iter().enumerate() {
            pixels[j * w + i] = col.depth(up, camera_height, room);
        }
    }
    DepthImage(Image::from_vec(w, h, pixels))
}

/// Renders disparity directly, with the per-pixel ray geometry of one camera
/// precomputed.
///
/// A ray is parametrised by its distance `f` along the optical axis: it meets
/// the floor or ceiling at an `f` fixed per row and a wall at an `f` fixed per
/// column, and its Euclidean length is `f·sqrt(1 + l² + u²)`. Each pixel is
/// then a min over two precomputed distances and one multiply.
#[derive(Clone, Debug)]
pub struct DisparityRenderer {
    width: usize,
    height: usize,
    lateral: Vec<f64>,
    norm: Vec<f64>,
    up: Vec<f64>,
    /// `f_x·baseline / sqrt(1 + l² + u²)`, row-major.
    gain: Vec<f64>,
}

impl DisparityRenderer {
    pub fn new(camera: &CameraModel) -> Self {
        let (w, h) = (camera.width, camera.height);
        let (fx, fy) = (camera.focal_x(), camera.focal_y());
        let fb = fx * camera.baseline;
        let lateral: Vec<f64> = (0..w).map(|i| (w as f64 / 2.0 - (i as f64 + 0.5)) / fx).collect();
        let up: Vec<f64> = (0..h).map(|j| (h as f64 / 2.0 - (j as f64 + 0.5)) / fy).collect();
        let norm = lateral.iter().map(|l| (1.0 + l * l).sqrt()).collect();
        let mut gain = Vec::with_capacity(w * h);
        for u in &up {
            gain.extend(lateral.iter().map(|l| fb / (1.0 + l * l + u * u).sqrt()));
        }
        DisparityRenderer {
            width: w,
            height: h,
            lateral,
            norm,
            up,
            gain,
        }
    }

    pub fn render(&self, pose: &Pose, camera_height: f64, room: &RoomConfig) -> DisparityMap {
        let z0 = camera_height;
        // inverse distances along the optical axis; 0 stands for "never"
        let row_inv: Vec<f64> = self
            .up
            .iter()
            .map(|&u| {
                if u > 0.0 {
                    u / (room.height - z0)
                } else if u < 0.0 {
                    -u / z0
                } else {
                    0.0
                }
            })
            .collect();
        let cols: Vec<(f64, f64, Option<f64>)> = self
            .lateral
            .iter()
            .zip(&self.norm)
            .map(|(&l, &n)| {
                let c = Column::new(pose, room, l);
                (c.wall / n, n / c.wall, c.through.map(|b| n / b))
            })
            .collect();
        let mut pixels = Vec::with_capacity(self.width * self.height);
        for (j, (&u, &ir)) in self.up.iter().zip(&row_inv).enumerate() {
            let gains = &self.gain[j * self.width..(j + 1) * self.width];
            pixels.extend(cols.iter().zip(gains).map(|(&(fw, iw, back), &g)| {
                let inv = if ir >= iw {
                    ir
                } else {
                    match back {
                        Some(ib) if room.in_window_height(z0 + u * fw) => ir.max(ib),
                        _ => iw,
                    }
                };
                g * inv
            }));
        }
        DisparityMap(Image::from_vec(self.width, self.height, pixels))
    }
}

//! Synthetic stereo sensing.
//!
//! The room is ray-cast to a depth image, converted to the disparity a stereo
//! pair with the given baseline would measure, and reduced to the four
//! blackboard inputs: window position and response from a summed-area-table
//! detector, plus normalised sum and left/right difference of disparity.

mod detect;
mod integral;
mod render;

use std::io::{self, Write};

pub use detect::{candidate_score, detect_window, detect_window_in, DetectorParams, Rect, WindowDetection, SIGMA_MAX};
pub use integral::{IntegralImage, RectOutOfBounds};
pub use render::{cast_ray, render_depth, DisparityRenderer};

use crate::bt::Blackboard;
use crate::sim::{Pose, RoomConfig};

/// Row-major image.
#[derive(Clone, Debug, PartialEq)]
pub struct Image<T> {
    width: usize,
    height: usize,
    pixels: Vec<T>,
}

impl<T: Copy> Image<T> {
    /// # Panics
    /// If `pixels.len() != width * height`.
    pub fn from_vec(width: usize, height: usize, pixels: Vec<T>) -> Self {
        assert_eq!(pixels.len(), width * height, "pixel buffer size mismatch");
        Image { width, height, pixels }
    }

    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Image {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: T) {
        self.pixels[y * self.width + x] = value;
    }

    pub fn pixels(&self) -> &[T] {
        &self.pixels
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Image<U> {
        Image {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| f(p)).collect(),
        }
    }
}

/// Per-pixel Euclidean ray length, metres.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthImage(pub Image<f64>);

/// Per-pixel disparity, pixels.
#[derive(Clone, Debug, PartialEq)]
pub struct DisparityMap(pub Image<f64>);

/// Pinhole stereo camera with square sensor pixels mapped to a 60°×45° view.
#[derive(Clone, Debug, PartialEq)]
pub struct CameraModel {
    pub width: usize,
    pub height: usize,
    pub hfov_deg: f64,
    pub vfov_deg: f64,
    /// Stereo baseline, metres.
    pub baseline: f64,
}

impl Default for CameraModel {
    fn default() -> Self {
        CameraModel {
            width: 128,
            height: 96,
            hfov_deg: 60.0,
            vfov_deg: 45.0,
            baseline: 0.06,
        }
    }
}

/// Range at which the disparity-sum input saturates, metres.
pub const SATURATION_RANGE: f64 = 0.25;

impl CameraModel {
    /// Horizontal focal length in pixels.
    pub fn focal_x(&self) -> f64 {
        (self.width as f64 / 2.0) / (self.hfov_deg.to_radians() / 2.0).tan()
    }

    pub fn focal_y(&self) -> f64 {
        (self.height as f64 / 2.0) / (self.vfov_deg.to_radians() / 2.0).tan()
    }

    /// Disparity of a point at `depth` metres.
    pub fn disparity(&self, depth: f64) -> f64 {
        self.focal_x() * self.baseline / depth
    }

    /// Disparity at the saturation range; normalises the disparity sum.
    pub fn max_disparity(&self) -> f64 {
        self.disparity(SATURATION_RANGE)
    }
}

pub fn to_disparity(camera: &CameraModel, depth: &DepthImage) -> DisparityMap {
    let fb = camera.focal_x() * camera.baseline;
    DisparityMap(depth.0.map(|d| fb / d))
}

/// The four blackboard inputs produced by the vision pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Features {
    pub x: f64,
    pub sigma: f64,
    pub sum_disparity: f64,
    pub delta: f64,
}

impl Features {
    /// Copies the inputs onto `bb`, leaving its rudder untouched.
    pub fn write_to(&self, bb: &mut Blackboard) {
        bb.x = self.x;
        bb.sigma = self.sigma;
        bb.sum_disparity = self.sum_disparity;
        bb.delta = self.delta;
    }
}

/// Disparity sum and left/right difference from a summed-area table.
fn disparity_stats(camera: &CameraModel, ii: &IntegralImage<f64>, epsilon: f64) -> (f64, f64) {
    let (w, h) = (ii.width(), ii.height());
    let total = ii.total();
    let left = ii.rect_sum_unchecked(0, 0, w / 2, h);
    let right = total - left;
    let n = (w * h) as f64;
    let sum = (total / (n * camera.max_disparity())).clamp(0.0, 1.0);
    let delta = ((left - right) / (total + epsilon)).clamp(-1.0, 1.0);
    (sum, delta)
}

pub fn extract_features(
    camera: &CameraModel,
    disparity: &DisparityMap,
    detection: &WindowDetection,
    epsilon: f64,
) -> Features {
    let ii = IntegralImage::new(&disparity.0);
    let (sum_disparity, delta) = disparity_stats(camera, &ii, epsilon);
    Features {
        x: detection.x,
        sigma: detection.sigma,
        sum_disparity,
        delta,
    }
}

/// The vision pipeline for one camera and detector: render disparity,
/// build the summed-area table, detect the window, extract features.
#[derive(Clone, Debug)]
pub struct Sensor {
    camera: CameraModel,
    detector: DetectorParams,
    renderer: DisparityRenderer,
}

impl Sensor {
    pub fn new(camera: &CameraModel, detector: &DetectorParams) -> Self {
        Sensor {
            camera: camera.clone(),
            detector: detector.clone(),
            renderer: DisparityRenderer::new(camera),
        }
    }

    pub fn disparity(&self, pose: &Pose, camera_height: f64, room: &RoomConfig) -> DisparityMap {
        self.renderer.render(pose, camera_height, room)
    }

    pub fn sense(&self, pose: &Pose, camera_height: f64, room: &RoomConfig) -> Features {
        let disparity = self.disparity(pose, camera_height, room);
        let ii = IntegralImage::new(&disparity.0);
        let detection = detect_window_in(&ii, &self.detector);
        let (sum_disparity, delta) = disparity_stats(&self.camera, &ii, self.detector.epsilon);
        Features {
            x: detection.x,
            sigma: detection.sigma,
            sum_disparity,
            delta,
        }
    }
}

/// One-off full pipeline; prefer a reused [`Sensor`] inside loops.
pub fn sense(
    camera: &CameraModel,
    params: &DetectorParams,
    pose: &Pose,
    camera_height: f64,
    room: &RoomConfig,
) -> Features {
    Sensor::new(camera, params).sense(pose, camera_height, room)
}

/// Writes an ASCII (P2) greyscale image, each value multiplied by `scale`
/// and rounded.
pub fn write_pgm<W: Write>(out: &mut W, image: &Image<f64>, scale: f64) -> io::Result<()> {
    let values: Vec<u32> = image
        .pixels()
        .iter()
        .map(|v| (v * scale).round().clamp(0.0, 65535.0) as u32)
        .collect();
    let max = values.iter().copied().max().unwrap_or(0).max(1);
    writeln!(out, "P2")?;
    writeln!(out, "{} {}", image.width(), image.height())?;
    writeln!(out, "{max}")?;
    for row in values.chunks(image.width()) {
        let line: Vec<String> = row.iter().map(u32::to_string).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn focal_lengths() {
        let cam = CameraModel::default();
        assert!((cam.focal_x() - 110.851_251_684_406_9).abs() < 1e-9);
        assert!((cam.disparity(1.0) - 6.651_075_101_064_41).abs() < 1e-9);
        assert_eq!(cam.disparity(2.0), cam.disparity(1.0) / 2.0);
        assert!(cam.disparity(1e12) < 1e-9);
    }

    #[test]
    fn disparity_is_elementwise() {
        let cam = CameraModel::default();
        let depth = DepthImage(Image::from_vec(2, 1, vec![1.0, 4.0]));
        let d = to_disparity(&cam, &depth);
        assert_eq!(d.0.get(0, 0), cam.disparity(1.0));
        assert_eq!(d.0.get(1, 0), cam.disparity(4.0));
    }

    #[test]
    fn saturated_uniform_map() {
        let cam = CameraModel::default();
        let map = DisparityMap(Image::filled(128, 96, cam.max_disparity()));
        let det = detect_window(&map, &DetectorParams::default());
        let f = extract_features(&cam, &map, &det, 1e-6);
        assert!((f.sum_disparity - 1.0).abs() < 1e-12);
        assert!(f.delta.abs() < 1e-12);
    }

    #[test]
    fn left_half_only() {
        let cam = CameraModel::default();
        let mut img = Image::filled(128, 96, 0.0);
        for y in 0..96 {
            for x in 0..64 {
                img.set(x, y, 2.0);
            }
        }
        let map = DisparityMap(img);
        let det = detect_window(&map, &DetectorParams::default());
        let f = extract_features(&cam, &map, &det, 1e-6);
        assert!((f.delta - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pgm_header_and_rows() {
        let img = Image::from_vec(3, 2, vec![0.0, 0.5, 1.0, 1.04, 2.0, 0.26]);
        let mut out = Vec::new();
        write_pgm(&mut out, &img, 10.0).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "P2\n3 2\n20\n0 5 10\n10 20 3\n");
    }
}

//! Window detection on a disparity map.
//!
//! A window shows up as a block of low disparity (far away) surrounded by
//! higher disparity (the nearer wall). Square candidates of several sizes
//! slide over the map; each is scored by the ratio of its mean disparity to
//! the mean of a surrounding ring, both read from a summed-area table.

use serde::{Deserialize, Serialize};

use super::{DisparityMap, IntegralImage};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorParams {
    /// Candidate side lengths, pixels.
    pub scales: Vec<usize>,
    /// Sliding step, pixels.
    pub stride: usize,
    /// Added to the ring mean to keep the score finite.
    pub epsilon: f64,
}

impl Default for DetectorParams {
    fn default() -> Self {
        DetectorParams {
            scales: vec![16, 24, 32, 48, 64],
            stride: 4,
            epsilon: 1e-6,
        }
    }
}

impl DetectorParams {
    pub fn validate(&self) -> Result<(), &'static str> {
        if self.scales.is_empty() || self.scales.contains(&0) {
            return Err("detector scales must be non-empty and positive");
        }
        if self.stride == 0 {
            return Err("detector stride must be positive");
        }
        if !(self.epsilon > 0.0) {
            return Err("detector epsilon must be positive");
        }
        Ok(())
    }
}

/// Pixel rectangle `[x, x+w) × [y, y+h)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowDetection {
    /// Horizontal centre of the best candidate, `[-1, 1]`.
    pub x: f64,
    /// Window response, `[0, 100]`; lower is more window-like.
    pub sigma: f64,
    pub rect: Option<Rect>,
}

pub const SIGMA_MAX: f64 = 100.0;

/// Score of a single candidate square, before clamping.
pub fn candidate_score(ii: &IntegralImage<f64>, rect: Rect, epsilon: f64) -> Option<f64> {
    let ring = rect.w / 2;
    let ox0 = rect.x.saturating_sub(ring);
    let oy0 = rect.y.saturating_sub(ring);
    let ox1 = (rect.x + rect.w + ring).min(ii.width());
    let oy1 = (rect.y + rect.h + ring).min(ii.height());
    let inner_area = rect.w * rect.h;
    let outer_area = (ox1 - ox0) * (oy1 - oy0);
    if outer_area == inner_area {
        return None;
    }
    let inner = ii.rect_sum_unchecked(rect.x, rect.y, rect.w, rect.h);
    let outer = ii.rect_sum_unchecked(ox0, oy0, ox1 - ox0, oy1 - oy0);
    let mean_in = inner / inner_area as f64;
    let mean_border = (outer - inner) / (outer_area - inner_area) as f64;
    Some(SIGMA_MAX * mean_in / (mean_border + epsilon))
}

/// Finds the most window-like square in `ii` (a table over a disparity map).
///
/// Ties are resolved towards the larger square, then the first position in
/// row-major scan order.
pub fn detect_window_in(ii: &IntegralImage<f64>, params: &DetectorParams) -> WindowDetection {
    let (w, h) = (ii.width(), ii.height());
    let mut scales = params.scales.clone();
    scales.sort_unstable_by(|a, b| b.cmp(a));
    scales.dedup();
    let mut best: Option<(f64, Rect)> = None;
    for side in scales {
        if side > w || side > h {
            continue;
        }
        for y in (0..=h - side).step_by(params.stride) {
            for x in (0..=w - side).step_by(params.stride) {
                let rect = Rect { x, y, w: side, h: side };
                let Some(score) = candidate_score(ii, rect, params.epsilon) else {
                    continue;
                };
                if best.map_or(true, |(s, _)| score < s) {
                    best = Some((score, rect));
                }
            }
        }
    }
    match best {
        Some((score, rect)) => {
            let half = w as f64 / 2.0;
            let centre = rect.x as f64 + rect.w as f64 / 2.0;
            WindowDetection {
                x: ((centre - half) / half).clamp(-1.0, 1.0),
                sigma: score.clamp(0.0, SIGMA_MAX),
                rect: Some(rect),
            }
        }
        None => WindowDetection {
            x: 0.0,
            sigma: SIGMA_MAX,
            rect: None,
        },
    }
}

pub fn detect_window(disparity: &DisparityMap, params: &DetectorParams) -> WindowDetection {
    detect_window_in(&IntegralImage::new(&disparity.0), params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vision::Image;

    fn block_map(bx: usize, by: usize, side: usize) -> DisparityMap {
        let mut img = Image::filled(128, 96, 5.0);
        for y in by..by + side {
            for x in bx..bx + side {
                img.set(x, y, 0.0);
            }
        }
        DisparityMap(img)
    }

    #[test]
    fn perfect_window_scores_zero() {
        let d = detect_window(&block_map(40, 20, 32), &DetectorParams::default());
        assert_eq!(d.sigma, 0.0);
        assert_eq!(
            d.rect,
            Some(Rect {
                x: 40,
                y: 20,
                w: 32,
                h: 32
            })
        );
        assert!((d.x - (56.0 - 64.0) / 64.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_map_has_no_evidence() {
        let d = detect_window(&DisparityMap(Image::filled(128, 96, 3.0)), &DetectorParams::default());
        assert!((d.sigma - 100.0).abs() < 1e-4, "{}", d.sigma);
    }

    #[test]
    fn translation_moves_detection_by_whole_strides() {
        let params = DetectorParams::default();
        let base = detect_window(&block_map(20, 24, 24), &params).rect.unwrap();
        for k in 1..8 {
            let moved = detect_window(&block_map(20 + 4 * k, 24, 24), &params).rect.unwrap();
            assert_eq!(moved.x, base.x + 4 * k);
            assert_eq!(moved.y, base.y);
            let moved = detect_window(&block_map(20, 24 + 4 * k, 24), &params).rect.unwrap();
            assert_eq!(moved.y, base.y + 4 * k);
        }
    }

    #[test]
    fn params_validation() {
        assert!(DetectorParams::default().validate().is_ok());
        let p = DetectorParams {
            stride: 0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}

//! Summed-area tables.
//!
//! The table has one extra row and column of zeros: entry `(x, y)` holds the
//! sum of every pixel `(x', y')` with `x' < x` and `y' < y`, so the sum over
//! `[x, x+w) × [y, y+h)` is four lookups with no edge cases.

use std::ops::{Add, Sub};

use thiserror::Error;

use super::Image;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("rectangle ({x}, {y}, {w}, {h}) exceeds {width}x{height} image")]
pub struct RectOutOfBounds {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
    pub width: usize,
    pub height: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralImage<T> {
    width: usize,
    height: usize,
    table: Vec<T>,
}

impl<T> IntegralImage<T>
where
    T: Copy + Default + Add<Output = T> + Sub<Output = T>,
{
    pub fn new(image: &Image<T>) -> Self {
        let (w, h) = (image.width(), image.height());
        let stride = w + 1;
        let mut table = vec![T::default(); stride * (h + 1)];
        for (y, src) in image.pixels().chunks_exact(w.max(1)).take(h).enumerate() {
            let (above, below) = table.split_at_mut((y + 1) * stride);
            let prev = &above[y * stride + 1..];
            let cur = &mut below[1..stride];
            let mut row = T::default();
            for ((c, &p), &a) in cur.iter_mut().zip(src).zip(prev) {
                row = row + p;
                *c = a + row;
            }
        }
        IntegralImage {
            width: w,
            height: h,
            table,
        }
    }

    /// Width of the source image.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Sum of pixels strictly above and left of `(x, y)`; `x ≤ width`, `y ≤ height`.
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> T {
        self.table[y * (self.width + 1) + x]
    }

    pub fn total(&self) -> T {
        self.at(self.width, self.height)
    }

    /// Sum over `[x, x+w) × [y, y+h)`.
    pub fn rect_sum(&self, x: usize, y: usize, w: usize, h: usize) -> Result<T, RectOutOfBounds> {
        if x + w > self.width || y + h > self.height {
            return Err(RectOutOfBounds {
                x,
                y,
                w,
                h,
                width: self.width,
                height: self.height,
            });
        }
        Ok(self.rect_sum_unchecked(x, y, w, h))
    }

    #[inline]
    pub(crate) fn rect_sum_unchecked(&self, x: usize, y: usize, w: usize, h: usize) -> T {
        self.at(x + w, y + h) + self.at(x, y) - self.at(x + w, y) - self.at(x, y + h)
    }
}

//! SLIC superpixel segmentation and label-map utilities.

mod color;
mod regions;
mod slic;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use color::{rgb_to_lab, srgb_to_linear};
pub use regions::{adjacent_pairs, is_label_connected, superpixel_bounding_boxes};
pub use slic::slic_segment;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SuperpixelError {
    #[error("invalid superpixel configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid image: {0}")]
    InvalidImage(String),
}

/// An image in CIELAB space, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<[f64; 3]>,
}

impl Image {
    pub fn from_lab(width: usize, height: usize, pixels: Vec<[f64; 3]>) -> Result<Self, SuperpixelError> {
        if width == 0 || height == 0 {
            return Err(SuperpixelError::InvalidImage(format!("empty image {width}x{height}")));
        }
        if pixels.len() != width * height {
            return Err(SuperpixelError::InvalidImage(format!(
                "expected {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    /// Builds from interleaved 8-bit sRGB.
    pub fn from_rgb8(width: usize, height: usize, rgb: &[u8]) -> Result<Self, SuperpixelError> {
        if rgb.len() != 3 * width * height {
            return Err(SuperpixelError::InvalidImage(format!(
                "expected {} bytes, got {}",
                3 * width * height,
                rgb.len()
            )));
        }
        let pixels = rgb.chunks_exact(3).map(|p| rgb_to_lab([p[0], p[1], p[2]])).collect();
        Self::from_lab(width, height, pixels)
    }

    /// Builds from 8-bit gray levels.
    pub fn from_gray8(width: usize, height: usize, gray: &[u8]) -> Result<Self, SuperpixelError> {
        let rgb: Vec<u8> = gray.iter().flat_map(|&g| [g, g, g]).collect();
        Self::from_rgb8(width, height, &rgb)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.pixels
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> [f64; 3] {
        self.pixels[y * self.width + x]
    }
}

/// Per-pixel superpixel ids in `0..count`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    count: usize,
}

impl LabelMap {
    /// Checks that every label lies in `0..count` and that every id is used.
    pub fn new(width: usize, height: usize, labels: Vec<u32>) -> Result<Self, SuperpixelError> {
        if width == 0 || height == 0 || labels.len() != width * height {
            return Err(SuperpixelError::InvalidImage(format!(
                "label map {width}x{height} with {} entries",
                labels.len()
            )));
        }
        let count = labels.iter().copied().max().map_or(0, |m| m as usize + 1);
        let mut seen = vec![false; count];
        for &l in &labels {
            seen[l as usize] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(SuperpixelError::InvalidImage("label ids are not contiguous".into()));
        }
        Ok(Self {
            width,
            height,
            labels,
            count,
        })
    }

    pub(crate) fn from_parts(width: usize, height: usize, labels: Vec<u32>, count: usize) -> Self {
        Self {
            width,
            height,
            labels,
            count,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of superpixels `K`.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Label under an image point, rounding to the nearest pixel centre and
    /// clamping to the map.
    pub fn label_at_point(&self, x: f64, y: f64) -> u32 {
        let (px, py) = self.clamp_point(x, y);
        self.at(px, py)
    }

    pub fn clamp_point(&self, x: f64, y: f64) -> (usize, usize) {
        let clamp = |v: f64, hi: usize| -> usize {
            if !(v > 0.0) {
                0
            } else {
                (v.round() as usize).min(hi - 1)
            }
        };
        (clamp(x, self.width), clamp(y, self.height))
    }
}

/// Inclusive pixel bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BBox {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl BBox {
    pub const fn new(x0: usize, y0: usize, x1: usize, y1: usize) -> Self {
        Self { x0, y0, x1, y1 }
    }

    /// Width in pixels.
    pub fn width(&self) -> usize {
        self.x1 - self.x0 + 1
    }

    /// Height in pixels.
    pub fn height(&self) -> usize {
        self.y1 - self.y0 + 1
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn union(&self, other: &BBox) -> BBox {
        BBox::new(
            self.x0.min(other.x0),
            self.y0.min(other.y0),
            self.x1.max(other.x1),
            self.y1.max(other.y1),
        )
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlicConfig {
    /// Requested superpixel count `M`.
    pub superpixels: usize,
    pub compactness: f64,
    pub max_iters: usize,
}

impl Default for SlicConfig {
    fn default() -> Self {
        Self {
            superpixels: 150,
            compactness: 10.0,
            max_iters: 10,
        }
    }
}

impl SlicConfig {
    pub fn with_superpixels(superpixels: usize) -> Self {
        Self {
            superpixels,
            ..Self::default()
        }
    }

    pub fn validate(&self, pixel_count: usize) -> Result<(), SuperpixelError> {
        grid_interval(pixel_count, self.superpixels)?;
        if !(self.compactness > 0.0) || !self.compactness.is_finite() {
            return Err(SuperpixelError::InvalidConfig(format!(
                "compactness must be positive, got {}",
                self.compactness
            )));
        }
        if self.max_iters == 0 {
            return Err(SuperpixelError::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// Expected superpixel side length `S = sqrt(N / M)`.
pub fn grid_interval(pixels: usize, superpixels: usize) -> Result<f64, SuperpixelError> {
    if superpixels == 0 || superpixels > pixels {
        return Err(SuperpixelError::InvalidConfig(format!(
            "superpixel count {superpixels} must lie in 1..={pixels}"
        )));
    }
    Ok((pixels as f64 / superpixels as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_interval_values() {
        assert_eq!(grid_interval(10_000, 100).unwrap(), 10.0);
        assert_eq!(grid_interval(200, 50).unwrap(), 2.0);
        assert!((grid_interval(307_200, 150).unwrap() - 45.254_833_995_939_04).abs() < 1e-12);
        assert!(grid_interval(100, 0).is_err());
        assert!(grid_interval(100, 101).is_err());
    }

    #[test]
    fn points_round_and_clamp_into_map() {
        let lm = LabelMap::new(2, 2, vec![0, 1, 2, 3]).unwrap();
        assert_eq!(lm.label_at_point(0.4, 0.4), 0);
        assert_eq!(lm.label_at_point(0.6, 0.2), 1);
        assert_eq!(lm.label_at_point(-5.0, 9.0), 2);
        assert_eq!(lm.label_at_point(f64::NAN, 1.2), 2);
    }

    #[test]
    fn label_map_rejects_gaps() {
        assert!(LabelMap::new(2, 1, vec![0, 2]).is_err());
        assert!(LabelMap::new(2, 1, vec![0]).is_err());
    }
}

//! Local image descriptors: multi-scale Harris interest points and order-3
//! Zernike moments over circular patches.
//!
//! The off-line pipeline is [`extract_descriptors`]: detect points on every
//! image, describe a disk of radius `radius_factor * scale` around each with
//! six complex Zernike coefficients, and emit them as 12-dimensional real
//! vectors tagged with the source image.

mod harris;
mod zernike;

pub use harris::{harris_multiscale, harris_response};
pub use zernike::zernike_descriptor;

use alloc::vec::Vec;

use crate::{Error, Result};

/// Descriptor dimensionality: six complex coefficients as (re, im) pairs.
pub const DESCRIPTOR_DIM: usize = 12;

/// Grayscale raster with intensities in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(Error::InvalidRaster);
        }
        if pixels.iter().any(|p| !(*p >= 0.0 && *p <= 1.0)) {
            return Err(Error::InvalidIntensity);
        }
        Ok(GrayImage { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    /// Lossless quarter-turn rotations; `turns` counts 90-degree steps
    /// counterclockwise. Useful for invariance checks.
    pub fn rotated_quarter_turns(&self, turns: u32) -> GrayImage {
        let mut img = self.clone();
        for _ in 0..(turns % 4) {
            let (w, h) = (img.width, img.height);
            let mut out = alloc::vec![0.0; w * h];
            // (x, y) -> (y, w - 1 - x) in the h x w result.
            for y in 0..h {
                for x in 0..w {
                    out[(w - 1 - x) * h + y] = img.pixels[y * w + x];
                }
            }
            img = GrayImage { width: h, height: w, pixels: out };
        }
        img
    }
}

/// A detected keypoint: position, detection scale (Gaussian sigma, pixels),
/// and Harris measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterestPoint {
    pub x: f64,
    pub y: f64,
    pub scale: f64,
    pub response: f64,
}

/// Detector and descriptor tuning. Defaults follow common multi-scale
/// Harris practice; everything is surfaced on the CLI.
#[derive(Debug, Clone)]
pub struct ExtractParams {
    /// Harris trace weight in `det - kappa * trace^2`.
    pub kappa: f64,
    /// Detection sigma ladder.
    pub scales: Vec<f64>,
    /// Per-scale response threshold as a fraction of that scale's maximum.
    pub threshold_ratio: f64,
    /// Keep at most this many points per image, by descending response.
    pub max_points: usize,
    /// Patch radius is `radius_factor * scale`.
    pub radius_factor: f64,
}

impl Default for ExtractParams {
    fn default() -> Self {
        let mut scales = Vec::with_capacity(5);
        let mut s = 1.6;
        for _ in 0..5 {
            scales.push(s);
            s *= 1.35;
        }
        ExtractParams {
            kappa: 0.04,
            scales,
            threshold_ratio: 1e-4,
            max_points: 300,
            radius_factor: 6.0,
        }
    }
}

/// One extracted descriptor with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorRecord {
    pub vector: Vec<f64>,
    pub image_id: u32,
    pub global_index: u64,
}

/// Runs detection and description over a batch of images.
///
/// Descriptors are emitted in (image order, response-descending) order and
/// `global_index` is assigned sequentially over the whole batch. Per-image
/// failures do not abort the batch; they are returned alongside the records.
pub fn extract_descriptors(
    images: &[(u32, GrayImage)],
    params: &ExtractParams,
) -> (Vec<DescriptorRecord>, Vec<(u32, Error)>) {
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut global_index = 0u64;
    for (image_id, image) in images {
        match image_descriptors(image, params) {
            Ok(vectors) => {
                for vector in vectors {
                    records.push(DescriptorRecord { vector, image_id: *image_id, global_index });
                    global_index += 1;
                }
            }
            Err(e) => failures.push((*image_id, e)),
        }
    }
    (records, failures)
}

/// Detection plus description for a single image, response-descending.
pub fn image_descriptors(image: &GrayImage, params: &ExtractParams) -> Result<Vec<Vec<f64>>> {
    let points = harris_multiscale(image, params)?;
    let mut out = Vec::with_capacity(points.len());
    for p in &points {
        // Detection already discarded points whose patch does not fit.
        out.push(zernike_descriptor(image, p, params.radius_factor)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_image_validation() {
        assert_eq!(GrayImage::new(0, 4, alloc::vec![]), Err(Error::InvalidRaster));
        assert_eq!(GrayImage::new(2, 2, alloc::vec![0.0; 3]), Err(Error::InvalidRaster));
        assert_eq!(
            GrayImage::new(2, 1, alloc::vec![0.5, 1.5]),
            Err(Error::InvalidIntensity)
        );
        assert_eq!(
            GrayImage::new(2, 1, alloc::vec![0.5, f64::NAN]),
            Err(Error::InvalidIntensity)
        );
        let img = GrayImage::new(2, 2, alloc::vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(img.get(1, 0), 1.0);
    }

    #[test]
    fn quarter_turn_rotation_is_lossless() {
        let img = GrayImage::new(3, 2, alloc::vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5]).unwrap();
        let r = img.rotated_quarter_turns(1);
        assert_eq!(r.width(), 2);
        assert_eq!(r.height(), 3);
        // (x, y) -> (y, w - 1 - x): pixel (2, 0) = 0.2 moves to (0, 0).
        assert_eq!(r.get(0, 0), 0.2);
        assert_eq!(r.get(1, 2), 0.3);
        let back = r.rotated_quarter_turns(3);
        assert_eq!(back, img);
        assert_eq!(img.rotated_quarter_turns(4), img);
    }

    #[test]
    fn extraction_reports_failures_and_continues() {
        let tiny = GrayImage::new(4, 4, alloc::vec![0.5; 16]).unwrap();
        let flat = GrayImage::new(32, 32, alloc::vec![0.5; 1024]).unwrap();
        let params = ExtractParams::default();
        let (records, failures) =
            extract_descriptors(&[(1, tiny), (2, flat)], &params);
        // The flat image legally yields zero records; the tiny one fails.
        assert!(records.is_empty());
        assert_eq!(failures.len(), 1);
        assert_eq!(failures[0].0, 1);
        assert!(matches!(failures[0].1, Error::ImageTooSmall { .. }));
    }

    #[test]
    fn identical_images_yield_identical_vectors() {
        // A deterministic textured image.
        let mut pixels = alloc::vec![0.0; 64 * 64];
        let mut v = 0x12345678u32;
        for p in pixels.iter_mut() {
            v = v.wrapping_mul(1664525).wrapping_add(1013904223);
            *p = f64::from(v >> 24) / 255.0;
        }
        let img = GrayImage::new(64, 64, pixels).unwrap();
        let params = ExtractParams::default();
        let (records, failures) =
            extract_descriptors(&[(10, img.clone()), (20, img)], &params);
        assert!(failures.is_empty());
        assert!(!records.is_empty());
        let a: Vec<_> = records.iter().filter(|r| r.image_id == 10).collect();
        let b: Vec<_> = records.iter().filter(|r| r.image_id == 20).collect();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.vector, y.vector);
        }
        // Global indices are sequential across the batch.
        for (i, r) in records.iter().enumerate() {
            assert_eq!(r.global_index, i as u64);
        }
    }
}

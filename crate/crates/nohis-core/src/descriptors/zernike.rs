//! Order-3 Zernike moments of a circular patch.
//!
//! The disk of radius `radius_factor * scale` around the point is mapped to
//! the unit disk and the six complex moments with repetition of order up to
//! three — (0,0), (1,1), (2,0), (2,2), (3,1), (3,3) — are accumulated by
//! direct summation with the standard `(p+1)/pi` normalization. The result
//! is the 12-vector of (re, im) pairs in that fixed order; a rotation of the
//! patch by theta multiplies coefficient (p, q) by `exp(-i q theta)`, so the
//! six magnitudes are rotation invariants.

use alloc::vec::Vec;

use super::{GrayImage, InterestPoint, DESCRIPTOR_DIM};
use crate::math;
use crate::{Error, Result};

/// (order p, repetition q) of the emitted coefficients, in output order.
pub const MOMENTS: [(u32, u32); 6] = [(0, 0), (1, 1), (2, 0), (2, 2), (3, 1), (3, 3)];

/// Computes the 12-dimensional descriptor of the disk around `point`.
///
/// The whole disk must lie inside the image.
pub fn zernike_descriptor(
    image: &GrayImage,
    point: &InterestPoint,
    radius_factor: f64,
) -> Result<Vec<f64>> {
    let radius = radius_factor * point.scale;
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::PatchOutOfBounds);
    }
    let (w, h) = (image.width() as f64, image.height() as f64);
    if point.x - radius < 0.0
        || point.y - radius < 0.0
        || point.x + radius > w - 1.0
        || point.y + radius > h - 1.0
    {
        return Err(Error::PatchOutOfBounds);
    }

    let x0 = math::ceil(point.x - radius) as usize;
    let x1 = (point.x + radius) as usize;
    let y0 = math::ceil(point.y - radius) as usize;
    let y1 = (point.y + radius) as usize;
    let r2 = radius * radius;

    // Accumulators for the six complex moments.
    let mut acc = [[0.0f64; 2]; 6];
    for y in y0..=y1 {
        for x in x0..=x1 {
            let dx = x as f64 - point.x;
            let dy = y as f64 - point.y;
            let d2 = dx * dx + dy * dy;
            if d2 > r2 {
                continue;
            }
            let f = image.get(x, y);
            if f == 0.0 {
                continue;
            }
            let rho2 = d2 / r2;
            let rho = math::sqrt(rho2);
            // exp(-i theta) built algebraically from the offset; the center
            // pixel has no angle and only contributes to the q = 0 terms.
            let (c1, s1) = if d2 > 0.0 {
                let d = math::sqrt(d2);
                (dx / d, -dy / d)
            } else {
                (1.0, 0.0)
            };
            let (c2, s2) = (c1 * c1 - s1 * s1, 2.0 * c1 * s1);
            let (c3, s3) = (c2 * c1 - s2 * s1, c2 * s1 + s2 * c1);

            // Radial polynomials of order <= 3.
            let r11 = rho;
            let r20 = 2.0 * rho2 - 1.0;
            let r22 = rho2;
            let r31 = (3.0 * rho2 - 2.0) * rho;
            let r33 = rho2 * rho;

            acc[0][0] += f;
            acc[1][0] += f * r11 * c1;
            acc[1][1] += f * r11 * s1;
            acc[2][0] += f * r20;
            acc[3][0] += f * r22 * c2;
            acc[3][1] += f * r22 * s2;
            acc[4][0] += f * r31 * c1;
            acc[4][1] += f * r31 * s1;
            acc[5][0] += f * r33 * c3;
            acc[5][1] += f * r33 * s3;
        }
    }

    // Z_pq = (p+1)/pi * sum f V_pq^* dA with dA = 1/r^2 per pixel.
    let mut out = Vec::with_capacity(DESCRIPTOR_DIM);
    for (i, (p, _)) in MOMENTS.iter().enumerate() {
        let norm = (*p as f64 + 1.0) / (core::f64::consts::PI * r2);
        out.push(acc[i][0] * norm);
        out.push(acc[i][1] * norm);
    }
    Ok(out)
}

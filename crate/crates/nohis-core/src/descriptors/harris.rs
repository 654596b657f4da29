//! Multi-scale Harris detection.
//!
//! For every sigma in the ladder the scale-adapted second-moment matrix is
//! formed from Gaussian derivatives at `sigma_d = sigma`, weighted by
//! `sigma_d^2` and integrated at `sigma_i = 1.5 sigma`. Responses are
//! `det - kappa * trace^2`; detections are strict local maxima over the
//! 3x3x3 space-scale neighborhood above a per-scale threshold, with points
//! whose descriptor patch would cross the image border discarded.

use alloc::vec::Vec;

use super::{ExtractParams, GrayImage, InterestPoint};
use crate::math;
use crate::{Error, Result};

const MIN_IMAGE_SIDE: usize = 16;
const INTEGRATION_FACTOR: f64 = 1.5;

/// Normalized Gaussian taps over `[-r, r]` with `r = ceil(3 sigma)`.
fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let r = math::ceil(3.0 * sigma) as i64;
    let inv2s2 = 1.0 / (2.0 * sigma * sigma);
    let mut k: Vec<f64> = (-r..=r).map(|t| math::exp(-(t * t) as f64 * inv2s2)).collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Antisymmetric derivative-of-Gaussian taps, normalized so that the
/// correlation of a unit ramp yields exactly one.
fn gaussian_deriv_kernel(sigma: f64) -> Vec<f64> {
    let r = math::ceil(3.0 * sigma) as i64;
    let inv2s2 = 1.0 / (2.0 * sigma * sigma);
    let mut k: Vec<f64> = (-r..=r)
        .map(|t| t as f64 * math::exp(-(t * t) as f64 * inv2s2))
        .collect();
    let scale: f64 = (-r..=r)
        .zip(k.iter())
        .map(|(t, v)| t as f64 * v)
        .sum();
    k.iter_mut().for_each(|v| *v /= scale);
    k
}

/// Horizontal correlation with edge replication.
fn correlate_rows(src: &[f64], width: usize, height: usize, kernel: &[f64], out: &mut [f64]) {
    let r = (kernel.len() / 2) as i64;
    for y in 0..height {
        let row = &src[y * width..(y + 1) * width];
        for x in 0..width {
            let mut acc = 0.0;
            for (i, k) in kernel.iter().enumerate() {
                let xx = (x as i64 + i as i64 - r).clamp(0, width as i64 - 1) as usize;
                acc += k * row[xx];
            }
            out[y * width + x] = acc;
        }
    }
}

/// Vertical correlation with edge replication.
fn correlate_cols(src: &[f64], width: usize, height: usize, kernel: &[f64], out: &mut [f64]) {
    let r = (kernel.len() / 2) as i64;
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for (i, k) in kernel.iter().enumerate() {
                let yy = (y as i64 + i as i64 - r).clamp(0, height as i64 - 1) as usize;
                acc += k * src[yy * width + x];
            }
            out[y * width + x] = acc;
        }
    }
}

fn separable(src: &[f64], w: usize, h: usize, kx: &[f64], ky: &[f64], scratch: &mut [f64]) -> Vec<f64> {
    let mut out = alloc::vec![0.0; src.len()];
    correlate_rows(src, w, h, kx, scratch);
    correlate_cols(scratch, w, h, ky, &mut out);
    out
}

/// Harris measure at one detection scale (`sigma_i = 1.5 sigma`), as a
/// row-major map the size of the image.
pub fn harris_response(image: &GrayImage, sigma: f64, kappa: f64) -> Vec<f64> {
    let (w, h) = (image.width(), image.height());
    let px = image.pixels();
    let g_d = gaussian_kernel(sigma);
    let dg = gaussian_deriv_kernel(sigma);
    let g_i = gaussian_kernel(INTEGRATION_FACTOR * sigma);
    let mut scratch = alloc::vec![0.0; px.len()];

    let lx = separable(px, w, h, &dg, &g_d, &mut scratch);
    let ly = separable(px, w, h, &g_d, &dg, &mut scratch);

    let s2 = sigma * sigma;
    let mut a = alloc::vec![0.0; px.len()];
    let mut b = alloc::vec![0.0; px.len()];
    let mut c = alloc::vec![0.0; px.len()];
    for i in 0..px.len() {
        a[i] = s2 * lx[i] * lx[i];
        b[i] = s2 * ly[i] * ly[i];
        c[i] = s2 * lx[i] * ly[i];
    }
    let a = separable(&a, w, h, &g_i, &g_i, &mut scratch);
    let b = separable(&b, w, h, &g_i, &g_i, &mut scratch);
    let c = separable(&c, w, h, &g_i, &g_i, &mut scratch);

    let mut response = alloc::vec![0.0; px.len()];
    for i in 0..px.len() {
        let det = a[i] * b[i] - c[i] * c[i];
        let tr = a[i] + b[i];
        response[i] = det - kappa * tr * tr;
    }
    response
}

/// Detects interest points across the sigma ladder of `params`, sorted by
/// descending response (ties by scale, then position) and capped at
/// `max_points`. A constant image yields an empty list.
pub fn harris_multiscale(image: &GrayImage, params: &ExtractParams) -> Result<Vec<InterestPoint>> {
    let (w, h) = (image.width(), image.height());
    if w < MIN_IMAGE_SIDE || h < MIN_IMAGE_SIDE {
        return Err(Error::ImageTooSmall { width: w, height: h });
    }
    let responses: Vec<Vec<f64>> = params
        .scales
        .iter()
        .map(|&s| harris_response(image, s, params.kappa))
        .collect();
    let thresholds: Vec<f64> = responses
        .iter()
        .map(|map| {
            let max = map.iter().copied().fold(f64::MIN, f64::max);
            params.threshold_ratio * max
        })
        .collect();

    let mut points = Vec::new();
    for (si, map) in responses.iter().enumerate() {
        if thresholds[si] <= 0.0 {
            continue;
        }
        let radius = math::ceil(params.radius_factor * params.scales[si]) as usize;
        if 2 * radius >= w || 2 * radius >= h {
            continue;
        }
        let (x0, x1) = (radius.max(1), (w - 1 - radius).min(w - 2));
        let (y0, y1) = (radius.max(1), (h - 1 - radius).min(h - 2));
        for y in y0..=y1 {
            for x in x0..=x1 {
                let r = map[y * w + x];
                if r <= 0.0 || r <= thresholds[si] {
                    continue;
                }
                if is_space_scale_maximum(&responses, si, x, y, w, r) {
                    points.push(InterestPoint {
                        x: x as f64,
                        y: y as f64,
                        scale: params.scales[si],
                        response: r,
                    });
                }
            }
        }
    }

    points.sort_by(|p, q| {
        q.response
            .total_cmp(&p.response)
            .then(p.scale.total_cmp(&q.scale))
            .then(p.y.total_cmp(&q.y))
            .then(p.x.total_cmp(&q.x))
    });
    points.truncate(params.max_points);
    Ok(points)
}

/// Strict maximum over the 26 space-scale neighbors, with exact ties broken
/// toward the lexicographically smallest (scale, y, x) so plateau responses
/// keep exactly one detection.
fn is_space_scale_maximum(
    responses: &[Vec<f64>],
    si: usize,
    x: usize,
    y: usize,
    width: usize,
    r: f64,
) -> bool {
    let lo = si.saturating_sub(1);
    let hi = (si + 1).min(responses.len() - 1);
    for (sj, map) in responses.iter().enumerate().take(hi + 1).skip(lo) {
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if sj == si && dx == 0 && dy == 0 {
                    continue;
                }
                let nx = (x as i64 + dx) as usize;
                let ny = (y as i64 + dy) as usize;
                let rn = map[ny * width + nx];
                if rn > r {
                    return false;
                }
                if rn == r {
                    let before = (sj, ny, nx) < (si, y, x);
                    if before {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_image(side: usize, square: usize) -> GrayImage {
        let mut px = alloc::vec![0.0; side * side];
        let start = (side - square) / 2;
        for y in start..start + square {
            for x in start..start + square {
                px[y * side + x] = 1.0;
            }
        }
        GrayImage::new(side, side, px).unwrap()
    }

    #[test]
    fn constant_image_has_no_points() {
        let img = GrayImage::new(32, 32, alloc::vec![0.7; 1024]).unwrap();
        let points = harris_multiscale(&img, &ExtractParams::default()).unwrap();
        assert!(points.is_empty());
    }

    #[test]
    fn tiny_image_is_rejected() {
        let img = GrayImage::new(8, 8, alloc::vec![0.0; 64]).unwrap();
        assert!(matches!(
            harris_multiscale(&img, &ExtractParams::default()),
            Err(Error::ImageTooSmall { .. })
        ));
    }

    #[test]
    fn detects_square_corners() {
        let img = square_image(64, 24);
        let points = harris_multiscale(&img, &ExtractParams::default()).unwrap();
        assert!(points.len() >= 4, "got {} points", points.len());
        let start = 20.0;
        let end = 43.0;
        let corners = [
            [start, start],
            [end, start],
            [start, end],
            [end, end],
        ];
        for corner in corners {
            let hit = points
                .iter()
                .any(|p| (p.x - corner[0]).abs() <= 2.0 && (p.y - corner[1]).abs() <= 2.0);
            assert!(hit, "no detection within 2 px of corner {corner:?}: {points:?}");
        }
    }

    #[test]
    fn corners_outrank_edge_midpoints() {
        let img = square_image(64, 24);
        let params = ExtractParams::default();
        let points = harris_multiscale(&img, &params).unwrap();
        let corners = [[20.0, 20.0], [43.0, 20.0], [20.0, 43.0], [43.0, 43.0]];
        let min_corner_response = corners
            .iter()
            .map(|c| {
                points
                    .iter()
                    .filter(|p| (p.x - c[0]).abs() <= 2.0 && (p.y - c[1]).abs() <= 2.0)
                    .map(|p| p.response)
                    .fold(f64::MIN, f64::max)
            })
            .fold(f64::MAX, f64::min);
        assert!(min_corner_response > 0.0);

        // The raw response at the edge midpoints is below every corner
        // detection (edges have a rank-one moment matrix).
        let map = harris_response(&img, params.scales[0], params.kappa);
        let mids = [[31usize, 20usize], [31, 43], [20, 31], [43, 31]];
        for [x, y] in mids {
            assert!(map[y * 64 + x] < min_corner_response);
        }
    }

    #[test]
    fn deriv_kernel_differentiates_a_ramp() {
        let k = gaussian_deriv_kernel(2.0);
        let r = k.len() / 2;
        // Correlating f(t) = t must give 1.
        let d: f64 = k
            .iter()
            .enumerate()
            .map(|(i, v)| (i as f64 - r as f64) * v)
            .sum();
        assert!((d - 1.0).abs() < 1e-12);
        let s: f64 = k.iter().sum();
        assert!(s.abs() < 1e-12);
    }
}

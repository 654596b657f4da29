//! Seeded synthetic data: Gaussian-mixture vector sets for index benchmarks
//! and textured shape images for the retrieval pipeline.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nohis_core::descriptors::GrayImage;
use nohis_core::VectorSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Gaussian mixture parameters. Component means are drawn uniformly in
/// `[-mean_extent, mean_extent]^dim` from `means_seed`, so two calls with
/// the same `means_seed` but different `draw_seed` sample the same mixture.
#[derive(Debug, Clone)]
pub struct MixtureSpec {
    pub count: usize,
    pub dim: usize,
    pub components: usize,
    /// Within-component standard deviation.
    pub spread: f64,
    pub mean_extent: f64,
}

impl MixtureSpec {
    pub fn new(count: usize, dim: usize, components: usize) -> Self {
        MixtureSpec { count, dim, components, spread: 1.0, mean_extent: 10.0 }
    }

    pub fn with_spread(mut self, spread: f64) -> Self {
        self.spread = spread;
        self
    }
}

/// Draws the mixture; returns the vectors and the component label of each.
pub fn gaussian_mixture(spec: &MixtureSpec, means_seed: u64, draw_seed: u64) -> (VectorSet, Vec<u32>) {
    assert!(spec.dim >= 1 && spec.components >= 1);
    let mut means_rng = ChaCha8Rng::seed_from_u64(means_seed);
    let means: Vec<Vec<f64>> = (0..spec.components)
        .map(|_| {
            (0..spec.dim)
                .map(|_| means_rng.gen_range(-spec.mean_extent..spec.mean_extent))
                .collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(draw_seed);
    let normal = Normal::new(0.0, spec.spread).expect("valid spread");
    let mut vectors = VectorSet::with_capacity(spec.dim, spec.count);
    let mut labels = Vec::with_capacity(spec.count);
    let mut row = vec![0.0f64; spec.dim];
    for _ in 0..spec.count {
        let c = rng.gen_range(0..spec.components);
        for (x, m) in row.iter_mut().zip(&means[c]) {
            *x = m + normal.sample(&mut rng);
        }
        vectors.push(&row);
        labels.push(c as u32);
    }
    (vectors, labels)
}

/// Generates `count` square images of textured shapes: overlapping gray
/// rectangles and discs under a crossed grating whose orientation and
/// frequency are stratified over the corpus, so every image carries a
/// distinct texture signature. Deterministic per seed.
pub fn shape_corpus(count: usize, side: usize, seed: u64) -> Vec<GrayImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            // Unique (orientation, frequency) cell per image. Frequencies
            // stay high enough that every image grows a dense blob lattice.
            let orient = PI * (i % 10) as f64 / 10.0;
            let freq = 0.55 + 0.06 * (i / 10) as f64;
            shape_image(side, orient, freq, &mut rng)
        })
        .collect()
}

fn shape_image(side: usize, orient: f64, freq: f64, rng: &mut ChaCha8Rng) -> GrayImage {
    let mut px = vec![rng.gen_range(0.2..0.3); side * side];
    let rects = rng.gen_range(4..8);
    for _ in 0..rects {
        let w = rng.gen_range(side / 8..side / 2);
        let h = rng.gen_range(side / 8..side / 2);
        let x0 = rng.gen_range(0..side - w);
        let y0 = rng.gen_range(0..side - h);
        let v = rng.gen_range(0.35..0.8);
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                px[y * side + x] = v;
            }
        }
    }
    let discs = rng.gen_range(1..4);
    for _ in 0..discs {
        let r = rng.gen_range(side / 12..side / 5) as f64;
        let cx = rng.gen_range(0..side) as f64;
        let cy = rng.gen_range(0..side) as f64;
        let v = rng.gen_range(0.3..0.7);
        let r2 = r * r;
        for y in 0..side {
            for x in 0..side {
                let dx = x as f64 - cx;
                let dy = y as f64 - cy;
                if dx * dx + dy * dy <= r2 {
                    px[y * side + x] = v;
                }
            }
        }
    }
    // A crossed grating at the image's own orientation and frequency: its
    // blob lattice carries a dense texture signature that separates the
    // descriptors of different images. The amplitude rivals the shape
    // contrast so texture, not corner geometry, dominates the patches.
    let (o1, a1) = (orient + rng.gen_range(-0.05..0.05), freq * rng.gen_range(0.98..1.02));
    let (o2, a2) = (o1 + FRAC_PI_2, a1 * rng.gen_range(0.7..0.8));
    let (p1, p2) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
    let amp = rng.gen_range(0.22..0.28);
    for y in 0..side {
        for x in 0..side {
            let (xf, yf) = (x as f64, y as f64);
            let g1 = (a1 * (xf * o1.cos() + yf * o1.sin()) + p1).sin();
            let g2 = (a2 * (xf * o2.cos() + yf * o2.sin()) + p2).sin();
            px[y * side + x] += amp * g1 * g2;
        }
    }
    // Per-pixel noise makes every image's patches unique.
    for p in px.iter_mut() {
        let noise: f64 = rng.gen_range(-0.02..0.02);
        *p = (*p + noise).clamp(0.0, 1.0);
    }
    GrayImage::new(side, side, px).expect("generated raster is valid")
}

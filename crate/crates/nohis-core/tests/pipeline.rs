//! Cross-module pipeline test: synthetic rasters through detection,
//! description, indexing, and search, checked against the sequential scan
//! at the crate's public surface.

use nohis_core::descriptors::{extract_descriptors, ExtractParams, GrayImage};
use nohis_core::linalg::{squared_distance, VectorSet};
use nohis_core::retrieval::{query_by_image, ScoreScheme};
use nohis_core::search::{brute_force_knn, knn_search, leaf_bound_audit};
use nohis_core::NohisTree;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn textured_image(side: usize, phase: f64, rng: &mut ChaCha8Rng) -> GrayImage {
    let mut px = vec![0.0f64; side * side];
    for y in 0..side {
        for x in 0..side {
            let fx = x as f64;
            let fy = y as f64;
            let v = 0.5
                + 0.22 * ((0.6 * fx + phase).sin() * (0.45 * fy + 2.0 * phase).sin())
                + rng.gen_range(-0.03..0.03);
            px[y * side + x] = v.clamp(0.0, 1.0);
        }
    }
    // A bright block gives the detector strong corners.
    let q = side / 4;
    for y in q..2 * q {
        for x in q..2 * q {
            px[y * side + x] = (px[y * side + x] + 0.4).min(1.0);
        }
    }
    GrayImage::new(side, side, px).unwrap()
}

#[test]
fn images_to_index_to_exact_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(321);
    let params = ExtractParams::default();
    let images: Vec<(u32, GrayImage)> = (0..6)
        .map(|i| (i as u32, textured_image(96, 0.9 * f64::from(i), &mut rng)))
        .collect();
    let (records, failures) = extract_descriptors(&images, &params);
    assert!(failures.is_empty());
    assert!(records.len() > 60, "expected a feature-rich corpus, got {}", records.len());

    let mut data = VectorSet::new(12);
    let mut ids = Vec::new();
    for r in &records {
        assert_eq!(r.vector.len(), 12);
        data.push(&r.vector);
        ids.push(r.image_id);
    }
    let tree = NohisTree::build_nohis(&data, &ids, 8, 1).unwrap();
    assert_eq!(tree.non_overlap_violations(1e-9), 0);

    // Tree search agrees with the scan on descriptor queries, and the
    // chained bounds stay below the true leaf distances.
    for r in records.iter().step_by(7) {
        let (list, _) = knn_search(&tree, &r.vector, 5).unwrap();
        let oracle = brute_force_knn(&data, &r.vector, 5).unwrap();
        assert_eq!(list.entries()[0].index, r.global_index);
        assert_eq!(list.entries()[0].dist2, 0.0);
        for (a, b) in list.entries().iter().zip(oracle.entries()) {
            assert!((a.dist2 - b.dist2).abs() <= 1e-9 * b.dist2.max(1.0));
        }
        for lb in leaf_bound_audit(&tree, &r.vector).unwrap() {
            assert!(lb.bound <= lb.min_dist2 + 1e-9);
        }
    }

    // Whole-image self-retrieval through the same tree.
    for (i, img) in &images {
        let ranking =
            query_by_image(&tree, img, &params, 10, 3, ScoreScheme::InverseDistance).unwrap();
        assert_eq!(ranking.entries[0].image_id, *i);
    }

    // Spot-check that stored leaf coordinates preserve distances to the
    // original vectors (the reflection chain is an isometry).
    let q = &records[0].vector;
    let (list, _) = knn_search(&tree, q, 3).unwrap();
    for e in list.entries() {
        let direct = squared_distance(q, data.row(e.index as usize));
        assert!((direct - e.dist2).abs() <= 1e-9 * direct.max(1.0));
    }
}

//! On-line query pipeline: extract query descriptors, search each, and fold
//! the per-descriptor hits into an image-level ranking.
//!
//! The aggregation is independent of which searcher produced the hits, so a
//! sequential scan plugged in place of the tree yields the same ranking.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::descriptors::{image_descriptors, ExtractParams, GrayImage};
use crate::search::{knn_search, Neighbor, NeighborList, SearchStats};
use crate::tree::NohisTree;
use crate::{Error, Result};

/// How a neighbor contributes to its image's score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreScheme {
    /// `1 / (1 + d^2)`: nearer matches dominate.
    #[default]
    InverseDistance,
    /// Every hit counts one vote.
    Count,
}

impl ScoreScheme {
    #[inline]
    fn weight(self, dist2: f64) -> f64 {
        match self {
            ScoreScheme::InverseDistance => 1.0 / (1.0 + dist2),
            ScoreScheme::Count => 1.0,
        }
    }
}

/// One ranked image.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedImage {
    pub image_id: u32,
    pub score: f64,
    pub supporting_matches: usize,
}

/// Images ordered by descending score; each image appears once.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ImageRanking {
    pub entries: Vec<RankedImage>,
}

/// Folds per-descriptor neighbor lists into a ranking of the images the
/// neighbors belong to, truncated to `top` entries. Ties in score order by
/// ascending image id.
pub fn rank_images<'a>(
    hits: impl IntoIterator<Item = &'a [Neighbor]>,
    scheme: ScoreScheme,
    top: usize,
) -> ImageRanking {
    let mut scores: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
    for list in hits {
        for n in list {
            let e = scores.entry(n.image_id).or_insert((0.0, 0));
            e.0 += scheme.weight(n.dist2);
            e.1 += 1;
        }
    }
    let mut entries: Vec<RankedImage> = scores
        .into_iter()
        .map(|(image_id, (score, supporting_matches))| RankedImage {
            image_id,
            score,
            supporting_matches,
        })
        .collect();
    entries.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.image_id.cmp(&b.image_id)));
    entries.truncate(top);
    ImageRanking { entries }
}

/// Full image query: extract descriptors with the same parameters used
/// off-line, run a k-NN search per descriptor, and rank the hit images.
///
/// Fails with [`Error::FeaturelessQuery`] when the image yields no
/// descriptors.
pub fn query_by_image(
    tree: &NohisTree,
    image: &GrayImage,
    params: &ExtractParams,
    k: usize,
    top: usize,
    scheme: ScoreScheme,
) -> Result<ImageRanking> {
    let vectors = image_descriptors(image, params)?;
    if vectors.is_empty() {
        return Err(Error::FeaturelessQuery);
    }
    let mut lists = Vec::with_capacity(vectors.len());
    for v in &vectors {
        let (list, _) = knn_search(tree, v, k)?;
        lists.push(list.into_vec());
    }
    Ok(rank_images(lists.iter().map(Vec::as_slice), scheme, top))
}

/// Direct single-vector query; a thin alias for [`knn_search`].
pub fn query_by_vector(
    tree: &NohisTree,
    q: &[f64],
    k: usize,
) -> Result<(NeighborList, SearchStats)> {
    knn_search(tree, q, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{squared_distance, VectorSet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn neighbor(image_id: u32, dist2: f64) -> Neighbor {
        Neighbor { index: 0, cluster: 0, image_id, dist2 }
    }

    #[test]
    fn ranking_orders_by_score_then_id() {
        let a = [neighbor(3, 0.0), neighbor(7, 1.0)];
        let b = [neighbor(7, 1.0), neighbor(5, 3.0)];
        let ranking = rank_images([&a[..], &b[..]], ScoreScheme::InverseDistance, 10);
        assert_eq!(ranking.entries[0].image_id, 3); // score 1.0
        assert_eq!(ranking.entries[1].image_id, 7); // score 0.5 + 0.5
        assert_eq!(ranking.entries[1].supporting_matches, 2);
        assert_eq!(ranking.entries[2].image_id, 5);

        let counted = rank_images([&a[..], &b[..]], ScoreScheme::Count, 10);
        // Vote counting: image 7 has two hits, 3 and 5 one each; ties by id.
        assert_eq!(counted.entries[0].image_id, 7);
        assert_eq!(counted.entries[1].image_id, 3);
        assert_eq!(counted.entries[2].image_id, 5);
    }

    #[test]
    fn adding_a_match_never_lowers_a_score() {
        let base = [neighbor(1, 2.0)];
        let more = [neighbor(1, 2.0), neighbor(1, 50.0)];
        for scheme in [ScoreScheme::InverseDistance, ScoreScheme::Count] {
            let r0 = rank_images([&base[..]], scheme, 10);
            let r1 = rank_images([&more[..]], scheme, 10);
            assert!(r1.entries[0].score >= r0.entries[0].score);
        }
    }

    /// The ranking must not depend on which exact searcher produced the
    /// hits: feed the aggregation from the tree and from a hand-rolled scan.
    #[test]
    fn aggregation_is_searcher_agnostic() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let mut data = VectorSet::new(4);
        let mut ids = Vec::new();
        for i in 0..400u32 {
            let row: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            data.push(&row);
            ids.push(i % 13);
        }
        let tree = NohisTree::build_nohis(&data, &ids, 10, 1).unwrap();
        let queries: Vec<Vec<f64>> =
            (0..5).map(|_| (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();

        let tree_lists: Vec<Vec<Neighbor>> = queries
            .iter()
            .map(|q| knn_search(&tree, q, 15).unwrap().0.into_vec())
            .collect();
        let scan_lists: Vec<Vec<Neighbor>> = queries
            .iter()
            .map(|q| {
                let mut table: Vec<Neighbor> = data
                    .rows()
                    .enumerate()
                    .map(|(i, row)| Neighbor {
                        index: i as u64,
                        cluster: 0,
                        image_id: ids[i],
                        dist2: squared_distance(q, row),
                    })
                    .collect();
                table.sort_by(|a, b| a.dist2.total_cmp(&b.dist2).then(a.index.cmp(&b.index)));
                table.truncate(15);
                table
            })
            .collect();

        for scheme in [ScoreScheme::InverseDistance, ScoreScheme::Count] {
            let from_tree = rank_images(tree_lists.iter().map(Vec::as_slice), scheme, 13);
            let from_scan = rank_images(scan_lists.iter().map(Vec::as_slice), scheme, 13);
            assert_eq!(from_tree.entries.len(), from_scan.entries.len());
            for (a, b) in from_tree.entries.iter().zip(&from_scan.entries) {
                assert_eq!(a.image_id, b.image_id);
                assert!((a.score - b.score).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn featureless_query_is_an_error() {
        let mut data = VectorSet::new(12);
        data.push(&[0.0; 12]);
        let tree = NohisTree::build_nohis(&data, &[0], 1, 1).unwrap();
        let flat = GrayImage::new(32, 32, alloc::vec![0.25; 1024]).unwrap();
        let err = query_by_image(&tree, &flat, &ExtractParams::default(), 5, 3, ScoreScheme::default());
        assert_eq!(err.unwrap_err(), Error::FeaturelessQuery);
    }
}

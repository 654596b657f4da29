//! Exact k-nearest-neighbor and range search over a [`NohisTree`].
//!
//! The descent is depth-first with the nearer child explored first. At every
//! internal node the query is re-expressed in the children's frame through
//! the node's reflection, MINDIST to both child rectangles is computed, and
//! each child's bound is raised to the running maximum of MINDIST values
//! along the path before the prune test. The running maximum is what keeps
//! the bound sound even though a child rectangle is not contained in its
//! parent's. All comparisons use squared distances.

use alloc::vec::Vec;

use crate::linalg::{squared_distance, VectorSet};
use crate::tree::{Mbr, Node, NohisTree};
use crate::{Error, Result};

/// One search hit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    /// Index of the descriptor in the database.
    pub index: u64,
    /// Leaf (cluster) the descriptor belongs to; 0 for scan results.
    pub cluster: u32,
    /// Image the descriptor was extracted from; 0 for scan results.
    pub image_id: u32,
    /// Squared Euclidean distance to the query.
    pub dist2: f64,
}

/// Fixed-capacity candidate list, ascending by squared distance. Unfilled
/// slots behave as infinite distance, so nothing is pruned before `k`
/// candidates exist.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    k: usize,
    entries: Vec<Neighbor>,
}

impl NeighborList {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "capacity must be at least 1");
        NeighborList { k, entries: Vec::with_capacity(k.min(1024)) }
    }

    pub fn capacity(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Neighbor] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<Neighbor> {
        self.entries
    }

    /// Distance of the k-th (worst) candidate; infinite while unfilled.
    #[inline]
    pub fn kth_dist2(&self) -> f64 {
        if self.entries.len() < self.k {
            f64::INFINITY
        } else {
            self.entries[self.k - 1].dist2
        }
    }

    /// Inserts in ascending order. A candidate is accepted only while the
    /// list is unfilled or its distance is strictly below the current k-th;
    /// equal distances order by ascending descriptor index.
    pub fn insert(&mut self, n: Neighbor) -> bool {
        if self.entries.len() == self.k {
            if n.dist2 >= self.entries[self.k - 1].dist2 {
                return false;
            }
            self.entries.pop();
        }
        let pos = self
            .entries
            .partition_point(|e| e.dist2 < n.dist2 || (e.dist2 == n.dist2 && e.index < n.index));
        self.entries.insert(pos, n);
        true
    }
}

/// Work accounting for one query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Leaves whose distance loop executed ("visited clusters").
    pub leaves_visited: usize,
    pub internal_nodes_visited: usize,
    pub distance_computations: usize,
    /// Subtrees skipped by the bound test.
    pub prunes: usize,
}

/// Squared distance from a point to the nearest point of a rectangle;
/// zero when the point lies inside the closed rectangle.
pub fn mindist(q: &[f64], r: &Mbr) -> Result<f64> {
    if q.len() != r.dim() {
        return Err(Error::DimensionMismatch { expected: r.dim(), got: q.len() });
    }
    Ok(mindist_unchecked(q, r))
}

#[inline]
fn mindist_unchecked(q: &[f64], r: &Mbr) -> f64 {
    let mut acc = 0.0;
    for ((x, lo), hi) in q.iter().zip(&r.lo).zip(&r.hi) {
        let d = if x < lo {
            lo - x
        } else if x > hi {
            x - hi
        } else {
            0.0
        };
        acc += d * d;
    }
    acc
}

/// Exact k-nearest neighbors of `q`. Returns `min(k, m)` hits in ascending
/// distance order, identical to what a sequential scan finds.
pub fn knn_search(tree: &NohisTree, q: &[f64], k: usize) -> Result<(NeighborList, SearchStats)> {
    if k < 1 {
        return Err(Error::InvalidCount);
    }
    if q.len() != tree.dim() {
        return Err(Error::DimensionMismatch { expected: tree.dim(), got: q.len() });
    }
    let mut list = NeighborList::new(k);
    let mut stats = SearchStats::default();
    knn_recurse(tree, tree.root(), q, 0.0, &mut list, &mut stats);
    Ok((list, stats))
}

fn knn_recurse(
    tree: &NohisTree,
    node: usize,
    q: &[f64],
    max_dist: f64,
    list: &mut NeighborList,
    stats: &mut SearchStats,
) {
    match tree.node(node) {
        Node::Leaf { coords, global_indices, image_ids, cluster_id } => {
            stats.leaves_visited += 1;
            stats.distance_computations += coords.len();
            for (i, row) in coords.rows().enumerate() {
                let dist2 = squared_distance(q, row);
                if dist2 < list.kth_dist2() {
                    list.insert(Neighbor {
                        index: global_indices[i],
                        cluster: *cluster_id,
                        image_id: image_ids[i],
                        dist2,
                    });
                }
            }
        }
        Node::Internal { reflection, left_mbr, right_mbr, left, right } => {
            stats.internal_nodes_visited += 1;
            // Both children share the reflected frame, so one transform
            // serves both MINDIST computations and the whole subtree below.
            let qp = reflection.apply(q);
            let dl = mindist_unchecked(&qp, left_mbr);
            let dr = mindist_unchecked(&qp, right_mbr);
            let (first, d_first, second, d_second) = if dl <= dr {
                (*left, dl, *right, dr)
            } else {
                (*right, dr, *left, dl)
            };
            let bound = max_dist.max(d_first);
            if bound < list.kth_dist2() {
                knn_recurse(tree, first, &qp, bound, list, stats);
            } else {
                stats.prunes += 1;
            }
            let bound = max_dist.max(d_second);
            if bound < list.kth_dist2() {
                knn_recurse(tree, second, &qp, bound, list, stats);
            } else {
                stats.prunes += 1;
            }
        }
    }
}

/// All descriptors within `radius` of `q`, ascending by distance (ties by
/// index). Same descent as the k-NN search with the fixed threshold
/// `radius^2` in place of the k-th candidate distance.
pub fn range_search(
    tree: &NohisTree,
    q: &[f64],
    radius: f64,
) -> Result<(Vec<Neighbor>, SearchStats)> {
    if radius.is_nan() || radius < 0.0 {
        return Err(Error::InvalidCount);
    }
    range_search_squared(tree, q, radius * radius)
}

/// [`range_search`] with the threshold given directly as a squared
/// distance. Taking the k-th squared distance of a k-NN result as the
/// threshold captures every boundary tie exactly, with no rounding through
/// a square root.
pub fn range_search_squared(
    tree: &NohisTree,
    q: &[f64],
    radius2: f64,
) -> Result<(Vec<Neighbor>, SearchStats)> {
    if radius2.is_nan() || radius2 < 0.0 {
        return Err(Error::InvalidCount);
    }
    if q.len() != tree.dim() {
        return Err(Error::DimensionMismatch { expected: tree.dim(), got: q.len() });
    }
    let mut hits = Vec::new();
    let mut stats = SearchStats::default();
    range_recurse(tree, tree.root(), q, 0.0, radius2, &mut hits, &mut stats);
    hits.sort_by(|a, b| a.dist2.total_cmp(&b.dist2).then(a.index.cmp(&b.index)));
    Ok((hits, stats))
}

fn range_recurse(
    tree: &NohisTree,
    node: usize,
    q: &[f64],
    max_dist: f64,
    radius2: f64,
    hits: &mut Vec<Neighbor>,
    stats: &mut SearchStats,
) {
    match tree.node(node) {
        Node::Leaf { coords, global_indices, image_ids, cluster_id } => {
            stats.leaves_visited += 1;
            stats.distance_computations += coords.len();
            for (i, row) in coords.rows().enumerate() {
                let dist2 = squared_distance(q, row);
                if dist2 <= radius2 {
                    hits.push(Neighbor {
                        index: global_indices[i],
                        cluster: *cluster_id,
                        image_id: image_ids[i],
                        dist2,
                    });
                }
            }
        }
        Node::Internal { reflection, left_mbr, right_mbr, left, right } => {
            stats.internal_nodes_visited += 1;
            let qp = reflection.apply(q);
            for (child, d) in [
                (*left, mindist_unchecked(&qp, left_mbr)),
                (*right, mindist_unchecked(&qp, right_mbr)),
            ] {
                let bound = max_dist.max(d);
                if bound <= radius2 {
                    range_recurse(tree, child, &qp, bound, radius2, hits, stats);
                } else {
                    stats.prunes += 1;
                }
            }
        }
    }
}

/// Sequential scan over the raw vectors: the definitive oracle and the
/// slowest baseline. `cluster` and `image_id` of the hits are zero.
pub fn brute_force_knn(data: &VectorSet, q: &[f64], k: usize) -> Result<NeighborList> {
    if data.is_empty() {
        return Err(Error::EmptyCluster);
    }
    if k < 1 {
        return Err(Error::InvalidCount);
    }
    if q.len() != data.dim() {
        return Err(Error::DimensionMismatch { expected: data.dim(), got: q.len() });
    }
    let mut list = NeighborList::new(k);
    for (i, row) in data.rows().enumerate() {
        let dist2 = squared_distance(q, row);
        if dist2 < list.kth_dist2() {
            list.insert(Neighbor { index: i as u64, cluster: 0, image_id: 0, dist2 });
        }
    }
    Ok(list)
}

/// Bound audit record for one leaf: the chained `max(maxDist, MINDIST)`
/// value a pruning-free descent reaches the leaf with, and the true nearest
/// squared distance inside it. Soundness means `bound <= min_dist2`.
#[derive(Debug, Clone)]
pub struct LeafBound {
    pub leaf_node: usize,
    pub cluster_id: u32,
    pub bound: f64,
    pub min_dist2: f64,
}

/// Visits every leaf without pruning, propagating the running-maximum bound
/// exactly as the search does.
pub fn leaf_bound_audit(tree: &NohisTree, q: &[f64]) -> Result<Vec<LeafBound>> {
    if q.len() != tree.dim() {
        return Err(Error::DimensionMismatch { expected: tree.dim(), got: q.len() });
    }
    let mut out = Vec::with_capacity(tree.leaf_count());
    let mut stack = alloc::vec![(tree.root(), q.to_vec(), 0.0f64)];
    while let Some((node, q_local, bound)) = stack.pop() {
        match tree.node(node) {
            Node::Leaf { coords, cluster_id, .. } => {
                let min_dist2 = coords
                    .rows()
                    .map(|row| squared_distance(&q_local, row))
                    .fold(f64::INFINITY, f64::min);
                out.push(LeafBound { leaf_node: node, cluster_id: *cluster_id, bound, min_dist2 });
            }
            Node::Internal { reflection, left_mbr, right_mbr, left, right } => {
                let qp = reflection.apply(&q_local);
                let dl = mindist_unchecked(&qp, left_mbr);
                let dr = mindist_unchecked(&qp, right_mbr);
                stack.push((*right, qp.clone(), bound.max(dr)));
                stack.push((*left, qp, bound.max(dl)));
            }
        }
    }
    Ok(out)
}

//! Principal Direction Divisive Partitioning.
//!
//! A vector set is bisected recursively by the hyperplane through the
//! cluster centroid orthogonal to the leading principal component. The leaf
//! with the largest scatter is always split next, until the requested number
//! of leaves exists or nothing splittable remains.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::linalg::{self, VectorSet};
use crate::{Error, Result};

/// A contiguous group of data points with cached statistics.
#[derive(Debug, Clone)]
pub struct Cluster {
    /// Indices into the data set, in original order.
    pub members: Vec<usize>,
    pub centroid: Vec<f64>,
    /// Total squared deviation from the centroid.
    pub scatter: f64,
}

impl Cluster {
    /// Computes centroid and scatter for the given member rows.
    pub fn from_members(data: &VectorSet, members: Vec<usize>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyCluster);
        }
        let n = data.dim();
        let mut w = alloc::vec![0.0; n];
        for &i in &members {
            for (acc, x) in w.iter_mut().zip(data.row(i)) {
                *acc += x;
            }
        }
        let inv = 1.0 / members.len() as f64;
        w.iter_mut().for_each(|c| *c *= inv);
        let scatter = members
            .iter()
            .map(|&i| linalg::squared_distance(data.row(i), &w))
            .sum();
        Ok(Cluster { members, centroid: w, scatter })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Whether the builder may bisect this cluster.
    fn splittable(&self, min_leaf: usize) -> bool {
        self.len() >= 2 && self.len() >= 2 * min_leaf && self.scatter >= linalg::SCATTER_EPS
    }
}

/// Result of one bisection: the sign of `g(d) = U^T (d - w)` decides the
/// side, with `g = 0` landing on the right.
#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub right: Cluster,
    pub left: Cluster,
    /// Leading principal component of the parent cluster (unit length).
    pub direction: Vec<f64>,
    /// Projection of the parent centroid onto the direction, `U^T w`.
    pub pivot: f64,
}

/// Bisects a cluster along its leading principal component.
pub fn split_cluster(cluster: &Cluster, data: &VectorSet) -> Result<SplitOutcome> {
    if cluster.len() < 2 || cluster.scatter < linalg::SCATTER_EPS {
        return Err(Error::DegenerateCluster);
    }
    let direction = linalg::principal_direction(
        data,
        Some(&cluster.members),
        &cluster.centroid,
        cluster.scatter,
    )?;
    let pivot = linalg::dot(&direction, &cluster.centroid);
    let mut right = Vec::new();
    let mut left = Vec::new();
    for &i in &cluster.members {
        if linalg::dot(&direction, data.row(i)) - pivot >= 0.0 {
            right.push(i);
        } else {
            left.push(i);
        }
    }
    if right.is_empty() || left.is_empty() {
        return Err(Error::DegenerateSplit);
    }
    Ok(SplitOutcome {
        right: Cluster::from_members(data, right)?,
        left: Cluster::from_members(data, left)?,
        direction,
        pivot,
    })
}

/// One node of the binary cluster hierarchy.
#[derive(Debug, Clone)]
pub enum ClusterNode {
    Internal {
        centroid: Vec<f64>,
        scatter: f64,
        direction: Vec<f64>,
        pivot: f64,
        left: usize,
        right: usize,
    },
    Leaf(Cluster),
}

impl ClusterNode {
    pub fn is_leaf(&self) -> bool {
        matches!(self, ClusterNode::Leaf(_))
    }
}

/// Binary cluster hierarchy produced by [`build`]. Node 0 is the root;
/// children always have larger ids than their parent.
#[derive(Debug, Clone)]
pub struct ClusterTree {
    nodes: Vec<ClusterNode>,
    point_count: usize,
    leaf_count: usize,
    split_scatters: Vec<f64>,
}

impl ClusterTree {
    pub fn root(&self) -> usize {
        0
    }

    pub fn nodes(&self) -> &[ClusterNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &ClusterNode {
        &self.nodes[id]
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    /// Scatter of each split in the order the builder performed them. Since
    /// the largest-scatter leaf is always chosen, the sequence is
    /// nonincreasing.
    pub fn split_scatters(&self) -> &[f64] {
        &self.split_scatters
    }

    /// For every node, the half-open range of leaf ordinals (left-to-right
    /// order) covered by its subtree.
    pub fn leaf_intervals(&self) -> Vec<(usize, usize)> {
        let mut intervals = alloc::vec![(0usize, 0usize); self.nodes.len()];
        // Two-phase DFS: count leaves on exit.
        let mut stack = alloc::vec![(self.root(), false)];
        let mut counter = 0usize;
        while let Some((id, expanded)) = stack.pop() {
            match &self.nodes[id] {
                ClusterNode::Leaf(_) => {
                    intervals[id] = (counter, counter + 1);
                    counter += 1;
                }
                ClusterNode::Internal { left, right, .. } => {
                    if expanded {
                        intervals[id] = (intervals[*left].0, intervals[*right].1);
                    } else {
                        stack.push((id, true));
                        stack.push((*right, false));
                        stack.push((*left, false));
                    }
                }
            }
        }
        intervals
    }

    /// Maps every data point to the ordinal of the leaf holding it.
    pub fn leaf_assignment(&self) -> Vec<usize> {
        let mut assignment = alloc::vec![0usize; self.point_count];
        let mut ordinal = 0usize;
        let mut stack = alloc::vec![self.root()];
        while let Some(id) = stack.pop() {
            match &self.nodes[id] {
                ClusterNode::Leaf(c) => {
                    for &m in &c.members {
                        assignment[m] = ordinal;
                    }
                    ordinal += 1;
                }
                ClusterNode::Internal { left, right, .. } => {
                    // Left-to-right leaf numbering: visit left first.
                    stack.push(*right);
                    stack.push(*left);
                }
            }
        }
        assignment
    }

    /// Longest root-to-leaf path, counted in edges.
    pub fn depth(&self) -> usize {
        let mut max = 0usize;
        let mut stack = alloc::vec![(self.root(), 0usize)];
        while let Some((id, d)) = stack.pop() {
            match &self.nodes[id] {
                ClusterNode::Leaf(_) => max = max.max(d),
                ClusterNode::Internal { left, right, .. } => {
                    stack.push((*left, d + 1));
                    stack.push((*right, d + 1));
                }
            }
        }
        max
    }
}

/// Heap entry: larger scatter wins, ties go to the earlier-created node.
struct Candidate {
    scatter: f64,
    node: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.scatter
            .total_cmp(&other.scatter)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Builds the cluster hierarchy by repeatedly splitting the largest-scatter
/// leaf until `c_max` leaves exist or no leaf is splittable.
///
/// A leaf is unsplittable when it has fewer than `2 * min_leaf` members or
/// its scatter is (numerically) zero, so the result may have fewer than
/// `c_max` leaves.
pub fn build(data: &VectorSet, c_max: usize, min_leaf: usize) -> Result<ClusterTree> {
    if data.is_empty() {
        return Err(Error::EmptyCluster);
    }
    if c_max < 1 || min_leaf < 1 {
        return Err(Error::InvalidCount);
    }
    let root = Cluster::from_members(data, (0..data.len()).collect())?;
    let mut tree = ClusterTree {
        nodes: alloc::vec![ClusterNode::Leaf(root)],
        point_count: data.len(),
        leaf_count: 1,
        split_scatters: Vec::new(),
    };
    let mut heap = BinaryHeap::new();
    if let ClusterNode::Leaf(c) = &tree.nodes[0] {
        if c.splittable(min_leaf) {
            heap.push(Candidate { scatter: c.scatter, node: 0 });
        }
    }

    while tree.leaf_count < c_max {
        let Some(Candidate { scatter, node }) = heap.pop() else {
            break;
        };
        let outcome = match &tree.nodes[node] {
            ClusterNode::Leaf(cluster) => match split_cluster(cluster, data) {
                Ok(o) => o,
                // A numerically one-sided split: leave the leaf alone.
                Err(Error::DegenerateSplit) => continue,
                Err(e) => return Err(e),
            },
            ClusterNode::Internal { .. } => unreachable!("heap entries reference leaves"),
        };
        let SplitOutcome { right, left, direction, pivot } = outcome;
        let left_id = tree.nodes.len();
        let right_id = left_id + 1;
        for (id, child) in [(left_id, left), (right_id, right)] {
            if child.splittable(min_leaf) {
                heap.push(Candidate { scatter: child.scatter, node: id });
            }
            tree.nodes.push(ClusterNode::Leaf(child));
        }
        let (centroid, parent_scatter) = match &tree.nodes[node] {
            ClusterNode::Leaf(c) => (c.centroid.clone(), c.scatter),
            ClusterNode::Internal { .. } => unreachable!(),
        };
        debug_assert_eq!(parent_scatter, scatter);
        tree.nodes[node] = ClusterNode::Internal {
            centroid,
            scatter,
            direction,
            pivot,
            left: left_id,
            right: right_id,
        };
        tree.leaf_count += 1;
        tree.split_scatters.push(scatter);
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn four_corners() -> VectorSet {
        let mut s = VectorSet::new(2);
        s.push(&[0.0, 0.0]);
        s.push(&[0.0, 1.0]);
        s.push(&[10.0, 0.0]);
        s.push(&[10.0, 1.0]);
        s
    }

    #[test]
    fn split_four_point_example() {
        let data = four_corners();
        let cluster = Cluster::from_members(&data, vec![0, 1, 2, 3]).unwrap();
        let out = split_cluster(&cluster, &data).unwrap();
        assert!((out.direction[0] - 1.0).abs() < 1e-9, "{:?}", out.direction);
        assert!(out.direction[1].abs() < 1e-9);
        assert!((out.pivot - 5.0).abs() < 1e-9);
        assert_eq!(out.left.members, vec![0, 1]);
        assert_eq!(out.right.members, vec![2, 3]);
    }

    #[test]
    fn boundary_point_goes_right() {
        let mut data = VectorSet::new(2);
        data.push(&[0.0, 0.0]);
        data.push(&[1.0, 0.0]);
        data.push(&[2.0, 0.0]);
        let cluster = Cluster::from_members(&data, vec![0, 1, 2]).unwrap();
        let out = split_cluster(&cluster, &data).unwrap();
        // g((1,0)) = 0 exactly: assigned to the right side.
        assert_eq!(out.right.members, vec![1, 2]);
        assert_eq!(out.left.members, vec![0]);
    }

    #[test]
    fn split_zero_scatter_is_error() {
        let mut data = VectorSet::new(2);
        data.push(&[1.0, 1.0]);
        data.push(&[1.0, 1.0]);
        let cluster = Cluster::from_members(&data, vec![0, 1]).unwrap();
        assert_eq!(
            split_cluster(&cluster, &data).unwrap_err(),
            Error::DegenerateCluster
        );
    }

    #[test]
    fn build_single_leaf() {
        let data = four_corners();
        let tree = build(&data, 1, 1).unwrap();
        assert_eq!(tree.leaf_count(), 1);
        match tree.node(tree.root()) {
            ClusterNode::Leaf(c) => assert_eq!(c.members, vec![0, 1, 2, 3]),
            _ => panic!("expected a single leaf"),
        }
    }

    #[test]
    fn build_c_max_two_matches_split() {
        let data = four_corners();
        let tree = build(&data, 2, 1).unwrap();
        assert_eq!(tree.leaf_count(), 2);
        let assignment = tree.leaf_assignment();
        assert_eq!(assignment, vec![0, 0, 1, 1]);
    }

    fn gaussian_blobs(
        rng: &mut ChaCha8Rng,
        centers: &[[f64; 2]],
        per_blob: usize,
        sigma: f64,
    ) -> (VectorSet, Vec<usize>) {
        let mut data = VectorSet::new(2);
        let mut labels = Vec::new();
        for (label, c) in centers.iter().enumerate() {
            for _ in 0..per_blob {
                // Box-Muller.
                let u1: f64 = rng.gen_range(1e-12..1.0);
                let u2: f64 = rng.gen_range(0.0..1.0);
                let r = (-2.0 * u1.ln()).sqrt();
                let (s, co) = (2.0 * core::f64::consts::PI * u2).sin_cos();
                data.push(&[c[0] + sigma * r * co, c[1] + sigma * r * s]);
                labels.push(label);
            }
        }
        (data, labels)
    }

    #[test]
    fn build_recovers_separated_blobs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let centers = [[0.0, 0.0], [30.0, 0.0], [0.0, 30.0], [30.0, 30.0]];
        let (data, labels) = gaussian_blobs(&mut rng, &centers, 50, 1.0);
        let tree = build(&data, 4, 1).unwrap();
        assert_eq!(tree.leaf_count(), 4);
        let assignment = tree.leaf_assignment();
        // Every leaf must be label-pure at 30-sigma separation.
        for leaf in 0..4 {
            let mut label_of_leaf = None;
            for (i, &a) in assignment.iter().enumerate() {
                if a == leaf {
                    match label_of_leaf {
                        None => label_of_leaf = Some(labels[i]),
                        Some(l) => assert_eq!(l, labels[i], "mixed leaf {leaf}"),
                    }
                }
            }
            assert!(label_of_leaf.is_some(), "empty leaf {leaf}");
        }
    }

    #[test]
    fn partition_and_monotone_scatter() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut data = VectorSet::new(3);
        for _ in 0..400 {
            let row: Vec<f64> = (0..3).map(|_| rng.gen_range(-4.0..4.0)).collect();
            data.push(&row);
        }
        let tree = build(&data, 16, 1).unwrap();

        // Leaves partition the index set.
        let mut seen = alloc::vec![false; data.len()];
        for node in tree.nodes() {
            if let ClusterNode::Leaf(c) = node {
                for &m in &c.members {
                    assert!(!seen[m], "index {m} in two leaves");
                    seen[m] = true;
                }
            }
        }
        assert!(seen.iter().all(|&s| s));

        // Children never exceed the parent's scatter.
        for node in tree.nodes() {
            if let ClusterNode::Internal { scatter, left, right, .. } = node {
                for child in [*left, *right] {
                    let cs = match tree.node(child) {
                        ClusterNode::Leaf(c) => c.scatter,
                        ClusterNode::Internal { scatter, .. } => *scatter,
                    };
                    assert!(cs <= scatter + 1e-9);
                }
            }
        }

        // The split log is the running maximum over the frontier.
        let log = tree.split_scatters();
        for pair in log.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-9, "split order violated: {pair:?}");
        }
    }

    #[test]
    fn min_leaf_blocks_small_splits() {
        let data = four_corners();
        let tree = build(&data, 4, 2).unwrap();
        // Root (4 members) may split into 2+2, but children (2 < 2*min_leaf)
        // may not split again.
        assert_eq!(tree.leaf_count(), 2);
    }

    #[test]
    fn build_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut data = VectorSet::new(4);
        for _ in 0..300 {
            let row: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            data.push(&row);
        }
        let a = build(&data, 10, 1).unwrap();
        let b = build(&data, 10, 1).unwrap();
        assert_eq!(a.leaf_assignment(), b.leaf_assignment());
        assert_eq!(a.split_scatters(), b.split_scatters());
    }

    #[test]
    fn empty_data_is_error() {
        let data = VectorSet::new(2);
        assert_eq!(build(&data, 4, 1).unwrap_err(), Error::EmptyCluster);
    }
}

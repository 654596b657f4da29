//! NOHIS-tree construction.
//!
//! The binary split hierarchy from [`crate::pddp`] is materialized into an
//! index: every internal node stores the reflection that maps the first
//! coordinate axis of its frame onto the split direction, together with the
//! bounding rectangles of both children *expressed in the reflected frame*.
//! After the reflection the first coordinate of a point is exactly its
//! projection onto the split direction, so the right child's rectangle
//! starts where the left child's ends and sibling rectangles never overlap.
//!
//! The same machinery with identity reflections produces the classic
//! overlapping baseline: identical splits, axis-aligned rectangles in the
//! original coordinates.

use alloc::vec::Vec;

use crate::linalg::{self, Reflection, VectorSet};
use crate::pddp::{self, ClusterNode, ClusterTree};
use crate::{Error, Result};

/// Minimum bounding rectangle: componentwise minima `lo` and maxima `hi`
/// over the enclosed vectors, so every face touches at least one of them.
#[derive(Debug, Clone, PartialEq)]
pub struct Mbr {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Mbr {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(c, (lo, hi))| *c >= lo - tol && *c <= hi + tol)
    }

    /// Volume of the intersection with another rectangle (0 when disjoint).
    pub fn overlap_volume(&self, other: &Mbr) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .map(|((alo, ahi), (blo, bhi))| (ahi.min(*bhi) - alo.max(*blo)).max(0.0))
            .product()
    }
}

/// Componentwise min/max rectangle of a non-empty set.
pub fn mbr_of(set: &VectorSet) -> Result<Mbr> {
    let mut rows = set.rows();
    let first = rows.next().ok_or(Error::EmptyCluster)?;
    let mut lo = first.to_vec();
    let mut hi = first.to_vec();
    for row in rows {
        for ((l, h), x) in lo.iter_mut().zip(&mut hi).zip(row) {
            if *x < *l {
                *l = *x;
            }
            if *x > *h {
                *h = *x;
            }
        }
    }
    Ok(Mbr { lo, hi })
}

/// One node of the index. Nodes live in a flat arena in pre-order
/// (node, left subtree, right subtree) with the root at index 0.
#[derive(Debug, Clone)]
pub enum Node {
    Internal {
        /// Maps this node's frame onto the children's common frame.
        reflection: Reflection,
        left_mbr: Mbr,
        right_mbr: Mbr,
        left: usize,
        right: usize,
    },
    Leaf {
        /// Descriptor coordinates in the cumulative reflected frame of the
        /// root-to-leaf path; distances to a transformed query need no
        /// further work.
        coords: VectorSet,
        global_indices: Vec<u64>,
        image_ids: Vec<u32>,
        cluster_id: u32,
    },
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }
}

/// How child coordinates and rectangles are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeStyle {
    /// Reflected frames, non-overlapping sibling rectangles.
    Reflected,
    /// Original frame everywhere; rectangles generally overlap.
    AxisAligned,
}

/// An unbalanced binary index over a fixed descriptor set.
#[derive(Debug, Clone)]
pub struct NohisTree {
    style: TreeStyle,
    dim: usize,
    descriptor_count: usize,
    leaf_count: usize,
    nodes: Vec<Node>,
}

struct BuildItem {
    hier_node: usize,
    coords: VectorSet,
    members: Vec<usize>,
    /// (arena slot of parent, true when this is the right child)
    parent: Option<(usize, bool)>,
    /// Arena slots of ancestor internal nodes, root first.
    path: Vec<usize>,
}

impl NohisTree {
    /// Builds the non-overlapping index: PDDP splits plus per-node
    /// reflections.
    pub fn build_nohis(
        data: &VectorSet,
        image_ids: &[u32],
        c_max: usize,
        min_leaf: usize,
    ) -> Result<NohisTree> {
        let hierarchy = pddp::build(data, c_max, min_leaf)?;
        Self::from_hierarchy(data, image_ids, &hierarchy, TreeStyle::Reflected)
    }

    /// Builds the overlapping baseline: identical splits, no reflections,
    /// rectangles axis-aligned in the original coordinates.
    pub fn build_pddp_baseline(
        data: &VectorSet,
        image_ids: &[u32],
        c_max: usize,
        min_leaf: usize,
    ) -> Result<NohisTree> {
        let hierarchy = pddp::build(data, c_max, min_leaf)?;
        Self::from_hierarchy(data, image_ids, &hierarchy, TreeStyle::AxisAligned)
    }

    /// Materializes an index from a prebuilt split hierarchy. Passing the
    /// same hierarchy with both styles yields two indexes with identical
    /// leaf membership, which is what the visited-cluster comparison needs.
    pub fn from_hierarchy(
        data: &VectorSet,
        image_ids: &[u32],
        hierarchy: &ClusterTree,
        style: TreeStyle,
    ) -> Result<NohisTree> {
        if data.is_empty() {
            return Err(Error::EmptyCluster);
        }
        if image_ids.len() != data.len() {
            return Err(Error::DimensionMismatch { expected: data.len(), got: image_ids.len() });
        }
        if hierarchy.point_count() != data.len() {
            return Err(Error::DimensionMismatch {
                expected: hierarchy.point_count(),
                got: data.len(),
            });
        }
        let intervals = hierarchy.leaf_intervals();
        let assignment = hierarchy.leaf_assignment();

        let mut nodes: Vec<Node> = Vec::with_capacity(hierarchy.nodes().len());
        let mut stack = alloc::vec![BuildItem {
            hier_node: hierarchy.root(),
            coords: data.clone(),
            members: (0..data.len()).collect(),
            parent: None,
            path: Vec::new(),
        }];

        while let Some(item) = stack.pop() {
            let slot = nodes.len();
            if let Some((parent, is_right)) = item.parent {
                match &mut nodes[parent] {
                    Node::Internal { left, right, .. } => {
                        if is_right {
                            *right = slot;
                        } else {
                            *left = slot;
                        }
                    }
                    Node::Leaf { .. } => unreachable!("parent slots are internal"),
                }
            }
            match hierarchy.node(item.hier_node) {
                ClusterNode::Leaf(_) => {
                    let BuildItem { coords, members, .. } = item;
                    let cluster_id = intervals[item.hier_node].0 as u32;
                    let global_indices = members.iter().map(|&m| m as u64).collect();
                    let ids = members.iter().map(|&m| image_ids[m]).collect();
                    nodes.push(Node::Leaf {
                        coords,
                        global_indices,
                        image_ids: ids,
                        cluster_id,
                    });
                }
                ClusterNode::Internal { direction, left: hl, right: hr, .. } => {
                    let reflection = match style {
                        TreeStyle::AxisAligned => Reflection::Identity,
                        TreeStyle::Reflected => {
                            // Express the split direction in this node's
                            // frame by folding the ancestor reflections,
                            // then renormalize away accumulated rounding.
                            let mut u = direction.clone();
                            for &a in &item.path {
                                match &nodes[a] {
                                    Node::Internal { reflection, .. } => {
                                        reflection.apply_in_place(&mut u)
                                    }
                                    Node::Leaf { .. } => unreachable!(),
                                }
                            }
                            let nu = linalg::norm(&u);
                            u.iter_mut().for_each(|c| *c /= nu);
                            linalg::make_reflection(&u)?
                        }
                    };

                    // Route members by the leaf interval of the left child;
                    // this reproduces the hierarchy's split decisions
                    // exactly, with no recomputation of g.
                    let left_end = intervals[*hl].1;
                    let dim = item.coords.dim();
                    let mut left_coords = VectorSet::new(dim);
                    let mut right_coords = VectorSet::new(dim);
                    let mut left_members = Vec::new();
                    let mut right_members = Vec::new();
                    for (row, &m) in item.coords.rows().zip(&item.members) {
                        if assignment[m] < left_end {
                            left_coords.push(row);
                            left_members.push(m);
                        } else {
                            right_coords.push(row);
                            right_members.push(m);
                        }
                    }
                    for side in [&mut left_coords, &mut right_coords] {
                        for row in side.rows_mut() {
                            reflection.apply_in_place(row);
                        }
                    }
                    let left_mbr = mbr_of(&left_coords)?;
                    let right_mbr = mbr_of(&right_coords)?;

                    nodes.push(Node::Internal {
                        reflection,
                        left_mbr,
                        right_mbr,
                        left: usize::MAX,
                        right: usize::MAX,
                    });

                    let mut child_path = item.path.clone();
                    child_path.push(slot);
                    // Right pushed first so the left child pops next and the
                    // arena ends up in pre-order.
                    stack.push(BuildItem {
                        hier_node: *hr,
                        coords: right_coords,
                        members: right_members,
                        parent: Some((slot, true)),
                        path: child_path.clone(),
                    });
                    stack.push(BuildItem {
                        hier_node: *hl,
                        coords: left_coords,
                        members: left_members,
                        parent: Some((slot, false)),
                        path: child_path,
                    });
                }
            }
        }

        Ok(NohisTree {
            style,
            dim: data.dim(),
            descriptor_count: data.len(),
            leaf_count: hierarchy.leaf_count(),
            nodes,
        })
    }

    /// Reassembles a tree from raw parts (deserialization path), validating
    /// the arena structure: a single binary tree rooted at 0, every slot
    /// reachable exactly once, aligned leaf payloads, and consistent counts.
    pub fn from_parts(style: TreeStyle, dim: usize, nodes: Vec<Node>) -> Result<NohisTree> {
        if nodes.is_empty() || dim == 0 {
            return Err(Error::MalformedTree);
        }
        let mut visited = alloc::vec![false; nodes.len()];
        let mut descriptor_count = 0usize;
        let mut leaf_count = 0usize;
        let mut stack = alloc::vec![0usize];
        while let Some(id) = stack.pop() {
            if id >= nodes.len() || visited[id] {
                return Err(Error::MalformedTree);
            }
            visited[id] = true;
            match &nodes[id] {
                Node::Leaf { coords, global_indices, image_ids, .. } => {
                    let size = coords.len();
                    if size == 0
                        || coords.dim() != dim
                        || global_indices.len() != size
                        || image_ids.len() != size
                    {
                        return Err(Error::MalformedTree);
                    }
                    descriptor_count += size;
                    leaf_count += 1;
                }
                Node::Internal { reflection, left_mbr, right_mbr, left, right } => {
                    if left_mbr.dim() != dim || right_mbr.dim() != dim {
                        return Err(Error::MalformedTree);
                    }
                    if let Some(d) = reflection.dim() {
                        if d != dim {
                            return Err(Error::MalformedTree);
                        }
                    }
                    stack.push(*left);
                    stack.push(*right);
                }
            }
        }
        if visited.iter().any(|v| !v) {
            return Err(Error::MalformedTree);
        }
        Ok(NohisTree { style, dim, descriptor_count, leaf_count, nodes })
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn style(&self) -> TreeStyle {
        self.style
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of indexed descriptors.
    pub fn descriptor_count(&self) -> usize {
        self.descriptor_count
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    /// Longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        let mut max = 0usize;
        let mut stack = alloc::vec![(self.root(), 0usize)];
        while let Some((id, d)) = stack.pop() {
            match &self.nodes[id] {
                Node::Leaf { .. } => max = max.max(d),
                Node::Internal { left, right, .. } => {
                    stack.push((*left, d + 1));
                    stack.push((*right, d + 1));
                }
            }
        }
        max
    }

    /// Every leaf with the arena ids of the internal nodes above it
    /// (root first). Used by audits and bound checks.
    pub fn leaf_paths(&self) -> Vec<(Vec<usize>, usize)> {
        let mut out = Vec::with_capacity(self.leaf_count);
        let mut stack = alloc::vec![(self.root(), Vec::new())];
        while let Some((id, path)) = stack.pop() {
            match &self.nodes[id] {
                Node::Leaf { .. } => out.push((path, id)),
                Node::Internal { left, right, .. } => {
                    let mut p = path.clone();
                    p.push(id);
                    stack.push((*right, p.clone()));
                    stack.push((*left, p));
                }
            }
        }
        out
    }

    /// Counts internal nodes whose sibling rectangles fail the first-axis
    /// separation `left.hi[0] <= right.lo[0] + tol`.
    pub fn non_overlap_violations(&self, tol: f64) -> usize {
        self.nodes
            .iter()
            .filter(|n| match n {
                Node::Internal { left_mbr, right_mbr, .. } => {
                    left_mbr.hi[0] > right_mbr.lo[0] + tol
                }
                Node::Leaf { .. } => false,
            })
            .count()
    }

    /// Counts internal nodes whose sibling rectangle interiors intersect:
    /// no axis separates them within `tol`.
    pub fn sibling_interior_overlaps(&self, tol: f64) -> usize {
        self.nodes
            .iter()
            .filter(|n| match n {
                Node::Internal { left_mbr, right_mbr, .. } => {
                    let separated = (0..left_mbr.dim()).any(|i| {
                        left_mbr.hi[i] <= right_mbr.lo[i] + tol
                            || right_mbr.hi[i] <= left_mbr.lo[i] + tol
                    });
                    !separated
                }
                Node::Leaf { .. } => false,
            })
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn four_corners() -> (VectorSet, Vec<u32>) {
        let mut s = VectorSet::new(2);
        s.push(&[0.0, 0.0]);
        s.push(&[0.0, 1.0]);
        s.push(&[10.0, 0.0]);
        s.push(&[10.0, 1.0]);
        (s, alloc::vec![0, 0, 1, 1])
    }

    fn random_set(rng: &mut ChaCha8Rng, m: usize, n: usize, scale: f64) -> VectorSet {
        let mut s = VectorSet::with_capacity(n, m);
        for _ in 0..m {
            let row: Vec<f64> = (0..n).map(|_| rng.gen_range(-scale..scale)).collect();
            s.push(&row);
        }
        s
    }

    #[test]
    fn mbr_examples() {
        let mut s = VectorSet::new(2);
        s.push(&[1.0, 5.0]);
        let r = mbr_of(&s).unwrap();
        assert_eq!(r.lo, vec![1.0, 5.0]);
        assert_eq!(r.hi, vec![1.0, 5.0]);

        let mut s = VectorSet::new(2);
        s.push(&[0.0, 2.0]);
        s.push(&[3.0, 1.0]);
        let r = mbr_of(&s).unwrap();
        assert_eq!(r.lo, vec![0.0, 1.0]);
        assert_eq!(r.hi, vec![3.0, 2.0]);

        assert_eq!(mbr_of(&VectorSet::new(3)).unwrap_err(), Error::EmptyCluster);
    }

    #[test]
    fn mbr_faces_touch_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let m = rng.gen_range(1..40);
            let set = random_set(&mut rng, m, 4, 2.0);
            let r = mbr_of(&set).unwrap();
            for i in 0..4 {
                let touches_lo = set.rows().any(|x| (x[i] - r.lo[i]).abs() < 1e-12);
                let touches_hi = set.rows().any(|x| (x[i] - r.hi[i]).abs() < 1e-12);
                assert!(touches_lo && touches_hi);
            }
        }
    }

    #[test]
    fn single_descriptor_tree() {
        let mut s = VectorSet::new(3);
        s.push(&[1.0, 2.0, 3.0]);
        let tree = NohisTree::build_nohis(&s, &[7], 1, 1).unwrap();
        assert_eq!(tree.leaf_count(), 1);
        assert_eq!(tree.nodes().len(), 1);
        match tree.node(0) {
            Node::Leaf { coords, global_indices, image_ids, cluster_id } => {
                assert_eq!(coords.row(0), &[1.0, 2.0, 3.0]);
                assert_eq!(global_indices, &[0]);
                assert_eq!(image_ids, &[7]);
                assert_eq!(*cluster_id, 0);
            }
            Node::Internal { .. } => panic!("expected a leaf root"),
        }
    }

    #[test]
    fn four_point_split_keeps_raw_frame_when_u_is_e1() {
        let (data, ids) = four_corners();
        let tree = NohisTree::build_nohis(&data, &ids, 2, 1).unwrap();
        assert_eq!(tree.leaf_count(), 2);
        match tree.node(tree.root()) {
            Node::Internal { reflection, left_mbr, right_mbr, .. } => {
                // U = e1, so no reflection and the children keep raw
                // coordinates.
                assert!(reflection.is_identity());
                assert_eq!(left_mbr.lo, vec![0.0, 0.0]);
                assert_eq!(left_mbr.hi, vec![0.0, 1.0]);
                assert_eq!(right_mbr.lo, vec![10.0, 0.0]);
                assert_eq!(right_mbr.hi, vec![10.0, 1.0]);
                assert!(left_mbr.hi[0] < right_mbr.lo[0]);
            }
            Node::Leaf { .. } => panic!("expected an internal root"),
        }
    }

    /// Walks the tree and asserts non-overlap, containment, and that the
    /// leaf coordinates map back to the original descriptors through the
    /// reflection chain.
    fn audit_tree(tree: &NohisTree, data: &VectorSet) {
        assert_eq!(tree.non_overlap_violations(1e-9), 0);
        assert_eq!(tree.sibling_interior_overlaps(1e-9), 0);
        for (path, leaf) in tree.leaf_paths() {
            let Node::Leaf { coords, global_indices, .. } = tree.node(leaf) else {
                unreachable!()
            };
            // Containment in the parent-side MBR.
            if let Some(&parent) = path.last() {
                let Node::Internal { left_mbr, right_mbr, left, .. } = tree.node(parent) else {
                    unreachable!()
                };
                let mbr = if *left == leaf { left_mbr } else { right_mbr };
                for row in coords.rows() {
                    assert!(mbr.contains(row, 1e-9));
                }
            }
            // Original coordinates recovered by unwinding the involutions.
            for (row, &gi) in coords.rows().zip(global_indices) {
                let mut x = row.to_vec();
                for &a in path.iter().rev() {
                    match tree.node(a) {
                        Node::Internal { reflection, .. } => reflection.apply_in_place(&mut x),
                        Node::Leaf { .. } => unreachable!(),
                    }
                }
                let orig = data.row(gi as usize);
                assert!(
                    linalg::squared_distance(&x, orig).sqrt() < 1e-9,
                    "leaf coords do not invert to original"
                );
            }
            // Distances inside a leaf match distances between originals.
            for i in 0..coords.len().min(5) {
                for j in (i + 1)..coords.len().min(5) {
                    let stored = linalg::squared_distance(coords.row(i), coords.row(j)).sqrt();
                    let orig = linalg::squared_distance(
                        data.row(global_indices[i] as usize),
                        data.row(global_indices[j] as usize),
                    )
                    .sqrt();
                    assert!((stored - orig).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn random_build_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in [2usize, 5, 12] {
            let data = random_set(&mut rng, 600, n, 3.0);
            let ids: Vec<u32> = (0..600).map(|i| (i % 37) as u32).collect();
            let tree = NohisTree::build_nohis(&data, &ids, 24, 1).unwrap();
            assert_eq!(tree.descriptor_count(), 600);
            audit_tree(&tree, &data);

            // Every descriptor index appears in exactly one leaf.
            let mut seen = alloc::vec![false; 600];
            for node in tree.nodes() {
                if let Node::Leaf { global_indices, .. } = node {
                    for &gi in global_indices {
                        assert!(!seen[gi as usize]);
                        seen[gi as usize] = true;
                    }
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn pivot_consistency_against_hierarchy() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let data = random_set(&mut rng, 500, 6, 2.0);
        let ids = alloc::vec![0u32; 500];
        let hier = pddp::build(&data, 16, 1).unwrap();
        let tree = NohisTree::from_hierarchy(&data, &ids, &hier, TreeStyle::Reflected).unwrap();

        // Parallel descent pairing tree nodes with hierarchy nodes.
        let mut stack = alloc::vec![(tree.root(), hier.root())];
        while let Some((t, h)) = stack.pop() {
            match (tree.node(t), hier.node(h)) {
                (
                    Node::Internal { left_mbr, right_mbr, left, right, .. },
                    ClusterNode::Internal { pivot, left: hl, right: hr, .. },
                ) => {
                    assert!(right_mbr.lo[0] >= pivot - 1e-9);
                    assert!(left_mbr.hi[0] < pivot + 1e-9);
                    stack.push((*left, *hl));
                    stack.push((*right, *hr));
                }
                (Node::Leaf { global_indices, .. }, ClusterNode::Leaf(c)) => {
                    let members: Vec<u64> = c.members.iter().map(|&m| m as u64).collect();
                    assert_eq!(global_indices, &members);
                }
                _ => panic!("tree and hierarchy shapes diverge"),
            }
        }
    }

    #[test]
    fn baseline_same_membership_but_overlapping() {
        // Two elongated diagonal blobs whose axis-aligned boxes overlap.
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let mut data = VectorSet::new(2);
        for _ in 0..300 {
            let t: f64 = rng.gen_range(-1.0..1.0);
            let jx: f64 = rng.gen_range(-0.05..0.05);
            let jy: f64 = rng.gen_range(-0.05..0.05);
            data.push(&[t + jx, t + jy]);
        }
        for _ in 0..300 {
            let t: f64 = rng.gen_range(-1.0..1.0);
            let jx: f64 = rng.gen_range(-0.05..0.05);
            let jy: f64 = rng.gen_range(-0.05..0.05);
            data.push(&[t + 0.4 + jx, t - 0.4 + jy]);
        }
        let ids = alloc::vec![0u32; 600];
        let hier = pddp::build(&data, 8, 1).unwrap();
        let nohis = NohisTree::from_hierarchy(&data, &ids, &hier, TreeStyle::Reflected).unwrap();
        let base = NohisTree::from_hierarchy(&data, &ids, &hier, TreeStyle::AxisAligned).unwrap();

        // Identical leaf membership (split decisions are basis-independent).
        let collect = |t: &NohisTree| {
            let mut leaves: Vec<(u32, Vec<u64>)> = t
                .nodes()
                .iter()
                .filter_map(|n| match n {
                    Node::Leaf { cluster_id, global_indices, .. } => {
                        Some((*cluster_id, global_indices.clone()))
                    }
                    Node::Internal { .. } => None,
                })
                .collect();
            leaves.sort();
            leaves
        };
        assert_eq!(collect(&nohis), collect(&base));

        // The baseline has at least one genuinely overlapping sibling pair;
        // the reflected build has none.
        let overlap_count = base
            .nodes()
            .iter()
            .filter(|n| match n {
                Node::Internal { left_mbr, right_mbr, .. } => {
                    left_mbr.overlap_volume(right_mbr) > 1e-12
                }
                Node::Leaf { .. } => false,
            })
            .count();
        assert!(overlap_count > 0, "expected overlap in the baseline");
        assert_eq!(nohis.non_overlap_violations(1e-9), 0);
    }

    #[test]
    fn baseline_single_leaf_equals_nohis() {
        let (data, ids) = four_corners();
        let a = NohisTree::build_nohis(&data, &ids, 1, 1).unwrap();
        let b = NohisTree::build_pddp_baseline(&data, &ids, 1, 1).unwrap();
        match (a.node(0), b.node(0)) {
            (
                Node::Leaf { coords: ca, global_indices: ga, .. },
                Node::Leaf { coords: cb, global_indices: gb, .. },
            ) => {
                assert_eq!(ca, cb);
                assert_eq!(ga, gb);
            }
            _ => panic!("expected single leaves"),
        }
    }

    #[test]
    fn mismatched_ids_rejected() {
        let (data, _) = four_corners();
        let err = NohisTree::build_nohis(&data, &[1, 2], 2, 1).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }
}
